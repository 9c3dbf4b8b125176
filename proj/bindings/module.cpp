// Python surface over the core library. Sources are passed as text; results
// come back as plain dicts/lists so callers need no wrapper types.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bitml/compiler.hpp"
#include "bitml/parser.hpp"
#include "bitml/txwire.hpp"
#include "bitml/verifier.hpp"

namespace py = pybind11;
using namespace bitml;

namespace {

ParsedFile parse_text(const std::string& source) {
  return parse_file({source, "<python>"});
}

py::dict result_dict(const VerificationResult& r) {
  py::dict d;
  d["verdict"] = r.verdict;
  d["states"] = r.stats.states_explored;
  d["regions"] = r.stats.regions;
  if (r.witness) {
    py::dict w;
    py::dict lengths;
    for (const auto& [name, len] : r.witness->lengths) lengths[name.c_str()] = len;
    w["lengths"] = lengths;
    py::list prefix, cycle;
    for (const auto& m : r.witness->prefix) prefix.append(to_string(m));
    for (const auto& m : r.witness->cycle) cycle.append(to_string(m));
    w["prefix"] = prefix;
    w["cycle"] = cycle;
    w["stutter_cycle"] = r.witness->stutter_cycle;
    d["witness"] = w;
  } else {
    d["witness"] = py::none();
  }
  return d;
}

std::vector<Strategy> strategies_of(const ParsedFile& f,
                                    const std::string& override_text) {
  if (!override_text.empty()) return parse_strategies(override_text);
  return f.strategies;
}

}  // namespace

PYBIND11_MODULE(_bitml, m) {
  m.doc() = "BitML contract toolchain";

  m.def(
      "check",
      [](const std::string& source) {
        auto f = parse_text(source);
        py::list out;
        for (const auto& e : check_static(f.spec)) {
          py::dict d;
          d["kind"] = to_string(e.kind);
          d["subject"] = e.subject;
          d["message"] = e.message;
          out.append(d);
        }
        return out;
      },
      py::arg("source"),
      "Static well-formedness errors; an empty list means the contract is "
      "well formed.");

  m.def(
      "verify_liquidity",
      [](const std::string& source, const std::string& strategies,
         int64_t epsilon) {
        auto f = parse_text(source);
        return result_dict(
            check_liquidity(f.spec, strategies_of(f, strategies), epsilon));
      },
      py::arg("source"), py::arg("strategies") = "", py::arg("epsilon") = 0);

  m.def(
      "verify_ltl",
      [](const std::string& source, const std::string& formula,
         const std::string& strategies) {
        auto f = parse_text(source);
        return result_dict(
            check_ltl(f.spec, strategies_of(f, strategies), parse_ltl(formula)));
      },
      py::arg("source"), py::arg("formula"), py::arg("strategies") = "");

  m.def(
      "compile",
      [](const std::string& source, int64_t fee_per_tx, bool strict) {
        auto f = parse_text(source);
        return dag_to_json(compile(f.spec, fee_per_tx, strict));
      },
      py::arg("source"), py::arg("fee_per_tx") = kDefaultFeePerTx,
      py::arg("strict") = false,
      "Transaction DAG as canonical JSON text.");

  m.def(
      "finalize",
      [](const std::string& source,
         const std::map<std::string, py::bytes>& preimages, int64_t fee_per_tx) {
        auto f = parse_text(source);
        auto dag = compile(f.spec, fee_per_tx, true);
        std::map<std::string, Bytes> pre;
        for (const auto& [name, data] : preimages) {
          std::string s = data;
          pre[name] = Bytes(s.begin(), s.end());
        }
        TestSigner signer;
        py::list out;
        for (const auto& tx : finalize(dag, signer, pre))
          out.append(to_hex(serialize(tx)));
        return out;
      },
      py::arg("source"), py::arg("preimages") = std::map<std::string, py::bytes>{},
      py::arg("fee_per_tx") = kDefaultFeePerTx,
      "Signed transactions (test signer) as hex strings, Tinit first.");

  m.def(
      "pretty",
      [](const std::string& source) {
        return pretty_print(parse_text(source).spec);
      },
      py::arg("source"), "Canonical source text.");

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<InsufficientFees>(m, "InsufficientFeesError");
  py::register_exception<StandardnessError>(m, "StandardnessViolationError");
}
