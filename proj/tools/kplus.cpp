// Command-line front end: check, annotate, transform and translate proofs.
//
// Exit codes: 0 success/valid/true, 1 invalid/false, 2 parse error,
// 3 fuel exhausted, 4 usage error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kplus/kplus.hpp"

namespace {

using namespace kplus;

constexpr int kExitValid = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitParse = 2;
constexpr int kExitFuel = 3;
constexpr int kExitUsage = 4;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

std::int64_t default_fuel() {
  if (const char* env = std::getenv("KPLUS_FUEL")) return std::atoll(env);
  return Fuel{}.budget;
}

// "o" is the circle annotation, "auto" picks one, anything else is a formula.
struct AnnChoice {
  bool is_auto = true;
  Annotation ann;
};

AnnChoice parse_ann(const std::string& s) {
  AnnChoice out;
  if (s == "auto") return out;
  out.is_auto = false;
  if (s == "o")
    out.ann = Annotation::circle();
  else
    out.ann = Annotation::of(parse_formula(s));
  return out;
}

CheckResult check_with(const CyclicProof& p, const AnnChoice& choice) {
  return choice.is_auto ? check_proof_auto(p) : check_proof(p, choice.ann);
}

bool g_json = false;

void report(const nlohmann::ordered_json& j, const std::string& text) {
  if (g_json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text << "\n";
}

int cmd_check(const std::string& file, const std::string& ann) {
  CyclicProof p = parse_proof(read_input(file));
  CheckResult r = check_with(p, parse_ann(ann));
  if (r.valid) {
    nlohmann::ordered_json j;
    j["status"] = "valid";
    j["annotation"] = print_annotation(r.annotation);
    report(j, "Valid (annotation: " + print_annotation(r.annotation) + ")");
    return kExitValid;
  }
  nlohmann::ordered_json j;
  j["status"] = "invalid";
  j["reason"] = fault_name(r.fault);
  j["node"] = r.node;
  report(j, std::string("Invalid: ") + fault_name(r.fault) + " at node " +
                std::to_string(r.node));
  return kExitInvalid;
}

int cmd_annotate(const std::string& file, const std::string& ann) {
  CyclicProof p = parse_proof(read_input(file));
  AnnChoice choice = parse_ann(ann);
  if (choice.is_auto) {
    std::cerr << "annotate requires a concrete annotation\n";
    return kExitUsage;
  }
  auto map = infer_annotations(p, choice.ann);
  nlohmann::ordered_json j;
  std::string text;
  for (const auto& [id, a] : map) {
    j[std::to_string(id)] = print_annotation(a);
    if (!text.empty()) text += "\n";
    text += "node " + std::to_string(id) + ": " + print_annotation(a);
  }
  report(j, text);
  return kExitValid;
}

int cmd_cutelim(const std::string& file, const std::string& out,
                const std::string& ann, std::int64_t fuel) {
  CyclicProof p = parse_proof(read_input(file));
  AnnChoice choice = parse_ann(ann);
  CheckResult r = check_with(p, choice);
  if (!r.valid) {
    std::cerr << "input proof is invalid: " << fault_name(r.fault) << " at node "
              << r.node << "\n";
    return kExitInvalid;
  }
  CyclicProof q = eliminate_cuts(p, r.annotation, Fuel{fuel});
  write_output(out, write_proof(q));
  nlohmann::ordered_json j;
  j["nodes"] = q.nodes.size();
  j["output"] = out;
  report(j, "Wrote " + out + " (" + std::to_string(q.nodes.size()) + " nodes)");
  return kExitValid;
}

int cmd_regularize(const std::string& file, const std::string& out, std::int64_t fuel) {
  CyclicProof p = parse_proof(read_input(file));
  CheckResult r = check_proof_auto(p);
  if (!r.valid) {
    std::cerr << "input proof is invalid: " << fault_name(r.fault) << " at node "
              << r.node << "\n";
    return kExitInvalid;
  }
  StreamCtx ctx{p.sigma, fuel};
  CyclicProof q = regularize(stream_of(p, r.annotation), ctx);
  write_output(out, write_proof(q));
  nlohmann::ordered_json j;
  j["nodes"] = q.nodes.size();
  j["output"] = out;
  report(j, "Wrote " + out + " (" + std::to_string(q.nodes.size()) + " nodes)");
  return kExitValid;
}

FormulaSet sigma_from_file(const std::string& path) {
  FormulaSet out;
  std::istringstream in(read_input(path));
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch)) || !trimmed.empty()) trimmed += ch;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (!trimmed.empty()) out.insert(parse_formula(trimmed));
  }
  return out;
}

int cmd_translate(const std::string& to, const std::string& file, const std::string& out,
                  const std::string& sigma_file, const std::string& ann,
                  std::int64_t fuel) {
  if (to == "sequent") {
    HilbertDocument doc = parse_hilbert(read_input(file));
    FormulaSet sigma = sigma_file.empty() ? doc.sigma : sigma_from_file(sigma_file);
    DerivResult dr = check_derivation(doc.root, sigma, {});
    if (!dr.valid) {
      std::cerr << "derivation is invalid: " << deriv_fault_name(dr.fault) << " at node "
                << dr.node << "\n";
      return kExitInvalid;
    }
    CyclicProof q = hilbert_to_sequent(doc.root, sigma, {}, Fuel{fuel});
    write_output(out, write_proof(q));
    report({{"output", out}}, "Wrote " + out);
    return kExitValid;
  }
  if (to == "hilbert") {
    CyclicProof p = parse_proof(read_input(file));
    AnnChoice choice = parse_ann(ann);
    CheckResult r = check_with(p, choice);
    if (!r.valid) {
      std::cerr << "input proof is invalid: " << fault_name(r.fault) << " at node "
                << r.node << "\n";
      return kExitInvalid;
    }
    HDeriv d = sequent_to_hilbert(p, r.annotation);
    write_output(out, write_hilbert(HilbertDocument{p.sigma, d}));
    report({{"output", out}}, "Wrote " + out);
    return kExitValid;
  }
  std::cerr << "--to must be sequent or hilbert\n";
  return kExitUsage;
}

int cmd_stats(const std::string& file) {
  CyclicProof p = parse_proof(read_input(file));
  CheckResult r = check_proof_auto(p);
  if (!r.valid) {
    std::cerr << "input proof is invalid: " << fault_name(r.fault) << " at node "
              << r.node << "\n";
    return kExitInvalid;
  }
  auto cands = annotation_candidates(p.at(p.root).goal);
  std::string cand_text;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (i) cand_text += ",";
    cand_text += print_annotation(cands[i]);
  }
  auto classes = class_partition(p, r.annotation).count();
  nlohmann::ordered_json j;
  j["local_height"] = local_height(p);
  j["nodes"] = rule_node_count(p);
  j["backlinks"] = backlink_count(p);
  j["slim"] = slim(p);
  j["cutfree"] = cut_free(p);
  j["classes"] = classes;
  j["candidates"] = cand_text;
  report(j, "local_height=" + std::to_string(local_height(p)) +
                " nodes=" + std::to_string(rule_node_count(p)) +
                " backlinks=" + std::to_string(backlink_count(p)) +
                " slim=" + (slim(p) ? "yes" : "no") +
                " cutfree=" + (cut_free(p) ? "yes" : "no") +
                " classes=" + std::to_string(classes) + " candidates=" + cand_text);
  return kExitValid;
}

int cmd_eq(const std::string& f1, const std::string& f2, int fragment,
           const std::string& ann) {
  CyclicProof p = parse_proof(read_input(f1));
  CyclicProof q = parse_proof(read_input(f2));
  bool equal;
  std::string mode;
  if (fragment >= 0) {
    AnnChoice choice = parse_ann(ann);
    Annotation a = choice.is_auto ? Annotation::circle() : choice.ann;
    equal = fragment_equal(p, q, a, static_cast<std::size_t>(fragment));
    mode = "fragment(" + std::to_string(fragment) + ")";
  } else {
    equal = proof_equal(p, q);
    mode = "bisimulation";
  }
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["equal"] = equal;
  report(j, mode + ": " + (equal ? "equal" : "different"));
  return equal ? kExitValid : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof toolkit for cyclic sequent proofs of the modal logic of transitive closure"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Report format: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string file, out = "-", ann = "auto", to, sigma_file, file2;
  std::int64_t fuel = default_fuel();
  int fragment = -1;

  auto* check = app.add_subcommand("check", "Check a proof file");
  check->add_option("file", file)->required();
  check->add_option("--ann", ann, "Annotation: a formula, o, or auto");

  auto* annotate = app.add_subcommand("annotate", "Print the per-node annotation map");
  annotate->add_option("file", file)->required();
  annotate->add_option("--ann", ann)->required();

  auto* cutelim = app.add_subcommand("cutelim", "Eliminate cuts and slim the proof");
  cutelim->add_option("file", file)->required();
  cutelim->add_option("-o,--out", out)->required();
  cutelim->add_option("--ann", ann);
  cutelim->add_option("--fuel", fuel);

  auto* regularize = app.add_subcommand("regularize", "Re-fold a proof into canonical cyclic form");
  regularize->add_option("file", file)->required();
  regularize->add_option("-o,--out", out)->required();
  regularize->add_option("--fuel", fuel);

  auto* translate = app.add_subcommand("translate", "Translate between derivations and proofs");
  translate->add_option("--to", to, "sequent or hilbert")->required();
  translate->add_option("file", file)->required();
  translate->add_option("-o,--out", out)->required();
  translate->add_option("--sigma", sigma_file, "File with one formula per line");
  translate->add_option("--ann", ann);
  translate->add_option("--fuel", fuel);

  auto* stats = app.add_subcommand("stats", "Structural statistics of a proof");
  stats->add_option("file", file)->required();

  auto* eq = app.add_subcommand("eq", "Compare two proofs");
  eq->add_option("file", file)->required();
  eq->add_option("file2", file2)->required();
  eq->add_option("--fragment", fragment, "Compare n-fragments instead of full unfoldings");
  eq->add_option("--ann", ann);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  g_json = format == "json";
  try {
    if (check->parsed()) return cmd_check(file, ann);
    if (annotate->parsed()) return cmd_annotate(file, ann);
    if (cutelim->parsed()) return cmd_cutelim(file, out, ann, fuel);
    if (regularize->parsed()) return cmd_regularize(file, out, fuel);
    if (translate->parsed()) return cmd_translate(to, file, out, sigma_file, ann, fuel);
    if (stats->parsed()) return cmd_stats(file);
    if (eq->parsed()) return cmd_eq(file, file2, fragment, ann);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const FuelExhausted& e) {
    std::cerr << e.what() << "\n";
    return kExitFuel;
  } catch (const AnnotationError& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const TooManyAtoms& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const ShapeError& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
