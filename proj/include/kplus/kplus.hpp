#ifndef KPLUS_KPLUS_HPP
#define KPLUS_KPLUS_HPP

#include "admissible.hpp"
#include "cutelim.hpp"
#include "engine.hpp"
#include "formula.hpp"
#include "hilbert.hpp"
#include "hilbert_io.hpp"
#include "proof.hpp"
#include "proof_io.hpp"
#include "sequent.hpp"

#endif
