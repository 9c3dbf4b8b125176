#include "bitml/compiler.hpp"

#include <algorithm>
#include <set>

#include "bitml/txwire.hpp"
#include "json.hpp"

namespace bitml {

using json = nlohmann::ordered_json;

std::string KeyRef::id() const {
  return participant + "/" + node + "/" + std::to_string(branch) + "/" + role;
}

ScriptPtr mkscript(ScriptExpr e) {
  return std::make_shared<ScriptExpr>(std::move(e));
}

SzPtr mksz(SzExpr e) { return std::make_shared<SzExpr>(std::move(e)); }

std::string to_string(StandardnessViolation::Kind k) {
  switch (k) {
    case StandardnessViolation::Kind::OversizedRedeemScript:
      return "oversized-redeem-script";
    case StandardnessViolation::Kind::OversizedPush:
      return "oversized-push";
    case StandardnessViolation::Kind::TooManyKeys:
      return "too-many-keys";
  }
  return "?";
}

const TxTemplate* TxDag::find(const std::string& name) const {
  for (const auto& t : templates)
    if (t.name == name) return &t;
  return nullptr;
}

// ---------------------------------------------------------------------------
// script_of

namespace {

std::string preimage_slot(const std::string& pfx, const std::string& secret) {
  return pfx + "pre." + secret;
}

SzPtr compile_aexpr(const AExpr& e, const std::string& pfx) {
  return std::visit(
      [&](const auto& x) -> SzPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntConst>) {
          return mksz({SzConst{x.value}});
        } else if constexpr (std::is_same_v<T, SecretLen>) {
          // abstract length = raw preimage size minus the fixed pad
          return mksz({SzSub{mksz({SzSize{preimage_slot(pfx, x.secret)}}),
                       mksz({SzConst{kSecretPad}})}});
        } else if constexpr (std::is_same_v<T, AAdd>) {
          return mksz({SzAdd{compile_aexpr(*x.lhs, pfx),
                       compile_aexpr(*x.rhs, pfx)}});
        } else {
          return mksz({SzSub{compile_aexpr(*x.lhs, pfx),
                       compile_aexpr(*x.rhs, pfx)}});
        }
      },
      e.node);
}

ScriptPtr compile_pred(const Predicate& p, const std::string& pfx) {
  return std::visit(
      [&](const auto& x) -> ScriptPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PTrue>) {
          return mkscript({TrueE{}});
        } else if constexpr (std::is_same_v<T, PNot>) {
          return mkscript({NotE{compile_pred(*x.inner, pfx)}});
        } else if constexpr (std::is_same_v<T, PAnd>) {
          return mkscript({BoolAnd{compile_pred(*x.lhs, pfx),
                           compile_pred(*x.rhs, pfx)}});
        } else if constexpr (std::is_same_v<T, POr>) {
          return mkscript({BoolOr{compile_pred(*x.lhs, pfx),
                           compile_pred(*x.rhs, pfx)}});
        } else if constexpr (std::is_same_v<T, PEq>) {
          return mkscript({CmpEq{compile_aexpr(*x.lhs, pfx),
                           compile_aexpr(*x.rhs, pfx)}});
        } else {
          return mkscript({CmpLt{compile_aexpr(*x.lhs, pfx),
                           compile_aexpr(*x.rhs, pfx)}});
        }
      },
      p.node);
}

// Secrets whose preimages the spending input must carry: the reveal list
// plus any secret the predicate mentions (revealed earlier, but needed
// again to evaluate the predicate on-chain).
std::vector<std::string> reveal_slot_secrets(const Reveal& r) {
  std::vector<std::string> out = r.secrets;
  if (r.predicate) {
    std::set<std::string> extra;
    collect_secrets(*r.predicate, extra);
    for (const auto& s : extra)
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

ScriptPtr branch_conjunct(const Branch& b, uint32_t idx, const BranchPath& prefix,
                          const ContractSpec& spec) {
  std::string pfx = "b" + std::to_string(idx) + ".";
  std::string node = path_to_string(prefix);
  AndE conj;

  CheckMultiAll multi;
  for (const auto& p : spec.participants) {
    multi.slots.push_back(pfx + "sig." + p.name);
    multi.keys.push_back({p.name, node, idx, "sig"});
  }
  conj.terms.push_back(mkscript({std::move(multi)}));

  uint32_t gi = 0;
  for (const auto& g : b.guards) {
    if (auto* a = std::get_if<AuthGuard>(&g)) {
      conj.terms.push_back(mkscript(
          {CheckSig{pfx + "auth." + std::to_string(gi) + "." + a->authorizer,
                    {a->authorizer, node, idx, "auth"}}}));
    }
    ++gi;
  }

  if (auto* r = std::get_if<Reveal>(&b.body)) {
    auto slotSecrets = reveal_slot_secrets(*r);
    for (const auto& s : slotSecrets) {
      Hash256 h{};
      if (const SecretCommitment* sc = spec.find_secret(s)) {
        Bytes bytes = from_hex(sc->hash);
        if (bytes.size() == h.size()) std::copy(bytes.begin(), bytes.end(), h.begin());
      }
      conj.terms.push_back(mkscript({PreimageHashEq{preimage_slot(pfx, s), h}}));
    }
    for (const auto& s : slotSecrets)
      conj.terms.push_back(
          mkscript({SizeGe{preimage_slot(pfx, s), kSecretPad}}));
    if (r->predicate && !std::holds_alternative<PTrue>(r->predicate->node))
      conj.terms.push_back(compile_pred(*r->predicate, pfx));
  }

  if (conj.terms.size() == 1) return conj.terms[0];
  return mkscript({std::move(conj)});
}

}  // namespace

ScriptPtr script_of(const Contract& node, const BranchPath& prefix,
                    const ContractSpec& spec) {
  std::vector<ScriptPtr> conjuncts;
  for (uint32_t i = 0; i < node.branches.size(); ++i)
    conjuncts.push_back(branch_conjunct(node.branches[i], i, prefix, spec));
  if (conjuncts.size() == 1) return conjuncts[0];
  return mkscript({OrE{"sel", std::move(conjuncts)}});
}

// ---------------------------------------------------------------------------
// compile

namespace {

Satoshi maxneed(const Contract& c, Satoshi fee);

Satoshi body_need(const Branch& b, Satoshi fee) {
  return std::visit(
      [&](const auto& body) -> Satoshi {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Withdraw>) {
          return 0;
        } else if constexpr (std::is_same_v<T, Split>) {
          Satoshi sum = 0;
          for (const auto& arm : body.arms) sum += maxneed(*arm.contract, fee);
          return sum;
        } else {
          return maxneed(*body.continuation, fee);
        }
      },
      b.body);
}

// Fee budget a contract output must carry to fund the costliest spending
// path below it.
Satoshi maxneed(const Contract& c, Satoshi fee) {
  Satoshi mx = 0;
  for (const auto& b : c.branches)
    mx = std::max(mx, fee + body_need(b, fee));
  return mx;
}

struct SlotTable {
  std::map<std::string, SlotDesc> byName;

  void collect(const ScriptExpr& e) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, CheckSig>) {
            byName[x.slot] = {x.slot, SlotDesc::Kind::Signature, x.key, ""};
          } else if constexpr (std::is_same_v<T, CheckMultiAll>) {
            for (size_t i = 0; i < x.slots.size(); ++i)
              byName[x.slots[i]] = {x.slots[i], SlotDesc::Kind::Signature,
                                    x.keys[i], ""};
          } else if constexpr (std::is_same_v<T, PreimageHashEq>) {
            // slot name is "b<i>.pre.<secret>"
            std::string s = x.slot.substr(x.slot.rfind('.') + 1);
            byName[x.slot] = {x.slot, SlotDesc::Kind::Preimage, {}, s};
          } else if constexpr (std::is_same_v<T, NotE>) {
            collect(*x.inner);
          } else if constexpr (std::is_same_v<T, BoolAnd> ||
                               std::is_same_v<T, BoolOr>) {
            collect(*x.lhs);
            collect(*x.rhs);
          } else if constexpr (std::is_same_v<T, AndE>) {
            for (const auto& t : x.terms) collect(*t);
          } else if constexpr (std::is_same_v<T, OrE>) {
            byName[x.selector_slot] = {x.selector_slot,
                                       SlotDesc::Kind::Selector, {}, ""};
            for (const auto& b : x.branches) collect(*b);
          }
        },
        e.node);
  }
};

struct Emitter {
  const ContractSpec& spec;
  Satoshi fee;
  TxDag& dag;

  std::vector<SlotDesc> slots_for(const ScriptPtr& script, int branch) {
    SlotTable table;
    table.collect(*script);
    std::vector<SlotDesc> out;
    for (const auto& name : witness_plan(*script, branch))
      out.push_back(table.byName.at(name));
    return out;
  }

  void emit_node(const Contract& c, const BranchPath& prefix,
                 const std::string& parentName, uint32_t outIdx,
                 Satoshi balance, Satoshi carry) {
    ScriptPtr parentScript = script_of(c, prefix, spec);
    for (uint32_t i = 0; i < c.branches.size(); ++i) {
      const Branch& b = c.branches[i];
      BranchPath path = prefix;
      path.push_back(i);

      TxTemplate t;
      t.name = "T_" + path_to_string(path);
      for (const auto& g : b.guards)
        if (auto* a = std::get_if<AfterGuard>(&g))
          t.locktime = std::max(t.locktime, a->height);

      TxInputTemplate in;
      in.source = InternalRef{parentName, outIdx};
      in.redeem_script = parentScript;
      in.selected_branch = int(i);
      in.witness_slots = slots_for(parentScript, int(i));
      t.inputs.push_back(std::move(in));

      Satoshi avail = balance + carry - fee;
      std::visit(
          [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, Withdraw>) {
              t.outputs.push_back({avail, P2PKHPayout{body.recipient}});
              dag.templates.push_back(std::move(t));
            } else if constexpr (std::is_same_v<T, Split>) {
              Satoshi carryAvail = carry - fee;
              std::vector<Satoshi> armCarry(body.arms.size(), 0);
              for (size_t k = 1; k < body.arms.size(); ++k)
                armCarry[k] = maxneed(*body.arms[k].contract, fee);
              Satoshi rest = carryAvail;
              for (size_t k = 1; k < body.arms.size(); ++k) rest -= armCarry[k];
              if (!armCarry.empty()) armCarry[0] = rest;
              for (size_t k = 0; k < body.arms.size(); ++k) {
                BranchPath armPath = path;
                armPath.push_back(uint32_t(k));
                t.outputs.push_back(
                    {body.arms[k].value + armCarry[k],
                     P2SHPayout{script_of(*body.arms[k].contract, armPath, spec)}});
              }
              std::string name = t.name;
              dag.templates.push_back(std::move(t));
              for (size_t k = 0; k < body.arms.size(); ++k) {
                BranchPath armPath = path;
                armPath.push_back(uint32_t(k));
                emit_node(*body.arms[k].contract, armPath, name, uint32_t(k),
                          body.arms[k].value, armCarry[k]);
              }
            } else {
              t.outputs.push_back(
                  {avail, P2SHPayout{script_of(*body.continuation, path, spec)}});
              std::string name = t.name;
              dag.templates.push_back(std::move(t));
              emit_node(*body.continuation, path, name, 0, balance, carry - fee);
            }
          },
          b.body);
    }
  }
};

}  // namespace

TxDag compile(const ContractSpec& spec, Satoshi fee_per_tx, bool strict) {
  TxDag dag;
  dag.fee_per_tx = fee_per_tx;
  for (const auto& p : spec.participants)
    dag.participant_pubkeys[p.name] = p.pubkey;

  Satoshi deposits = spec.total_deposit_value();
  Satoshi fees = spec.total_fee_value();
  dag.total_fee_input = fees;

  TxTemplate init;
  init.name = "Tinit";
  auto add_external = [&](const DepositItem& d) {
    TxInputTemplate in;
    in.source = d.outpoint;
    KeyRef key{d.owner, "deposit", 0, "deposit"};
    in.witness_slots.push_back(
        {"sig." + d.owner, SlotDesc::Kind::Signature, key, ""});
    init.inputs.push_back(std::move(in));
  };
  for (const auto& d : spec.precondition.persistent_deposits) add_external(d);
  for (const auto& d : spec.precondition.fee_deposits) add_external(d);
  init.outputs.push_back({deposits + fees - fee_per_tx,
                          P2SHPayout{script_of(spec.contract, {}, spec)}});
  dag.templates.push_back(std::move(init));

  Emitter em{spec, fee_per_tx, dag};
  em.emit_node(spec.contract, {}, "Tinit", 0, deposits, fees - fee_per_tx);

  Satoshi required = fee_per_tx * Satoshi(dag.templates.size());
  if (fees < required) throw InsufficientFees(required, fees);

  if (strict) {
    auto violations = check_standardness(dag);
    if (!violations.empty()) throw StandardnessError(std::move(violations));
  }
  return dag;
}

// ---------------------------------------------------------------------------
// Standardness

namespace {

std::optional<StandardnessViolation> script_violation(const ScriptExpr& s) {
  try {
    Bytes bytes = assemble_script(s);
    if (bytes.size() > kMaxPushBytes) {
      return StandardnessViolation{
          StandardnessViolation::Kind::OversizedRedeemScript, "", bytes.size(),
          "redeem script is " + std::to_string(bytes.size()) +
              " bytes, limit is " + std::to_string(kMaxPushBytes)};
    }
  } catch (const PushTooLarge& e) {
    return StandardnessViolation{StandardnessViolation::Kind::OversizedPush, "",
                                 e.size, e.what()};
  } catch (const TooManyKeys& e) {
    return StandardnessViolation{StandardnessViolation::Kind::TooManyKeys, "",
                                 e.count, e.what()};
  }
  return std::nullopt;
}

}  // namespace

std::vector<StandardnessViolation> check_standardness(const TxDag& dag) {
  std::vector<StandardnessViolation> out;
  for (const auto& t : dag.templates) {
    for (size_t k = 0; k < t.outputs.size(); ++k) {
      if (auto* p2sh = std::get_if<P2SHPayout>(&t.outputs[k].payout)) {
        if (auto v = script_violation(*p2sh->script)) {
          v->location = t.name + ":output" + std::to_string(k);
          out.push_back(std::move(*v));
        }
      }
    }
  }
  return out;
}

namespace {

void walk_choices(const Contract& c, const BranchPath& prefix,
                  const ContractSpec& spec, std::vector<RewriteHint>& out) {
  if (auto v = script_violation(*script_of(c, prefix, spec))) {
    out.push_back({prefix, c.branches.size(), v->size,
                   "choice at [" + path_to_string(prefix) + "] compiles to " +
                       std::to_string(v->size) +
                       " script bytes; rewrite its " +
                       std::to_string(c.branches.size()) +
                       " branches as nested 2-way choices"});
  }
  for (uint32_t i = 0; i < c.branches.size(); ++i) {
    BranchPath path = prefix;
    path.push_back(i);
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Split>) {
            for (uint32_t k = 0; k < body.arms.size(); ++k) {
              BranchPath armPath = path;
              armPath.push_back(k);
              walk_choices(*body.arms[k].contract, armPath, spec, out);
            }
          } else if constexpr (std::is_same_v<T, Reveal>) {
            walk_choices(*body.continuation, path, spec, out);
          }
        },
        c.branches[i].body);
  }
}

}  // namespace

std::vector<RewriteHint> suggest_flattening(const ContractSpec& spec) {
  std::vector<RewriteHint> out;
  walk_choices(spec.contract, {}, spec, out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

json key_json(const KeyRef& k) {
  return json{{"participant", k.participant},
              {"node", k.node},
              {"branch", k.branch},
              {"role", k.role}};
}

json sz_json(const SzExpr& e) {
  return std::visit(
      [&](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SzConst>) {
          return json{{"const", x.value}};
        } else if constexpr (std::is_same_v<T, SzSize>) {
          return json{{"size", x.slot}};
        } else if constexpr (std::is_same_v<T, SzAdd>) {
          return json{{"add", json::array({sz_json(*x.lhs), sz_json(*x.rhs)})}};
        } else {
          return json{{"sub", json::array({sz_json(*x.lhs), sz_json(*x.rhs)})}};
        }
      },
      e.node);
}

json script_json(const ScriptExpr& e) {
  return std::visit(
      [&](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TrueE>) {
          return json{{"op", "true"}};
        } else if constexpr (std::is_same_v<T, CheckSig>) {
          return json{{"op", "checksig"}, {"slot", x.slot}, {"key", key_json(x.key)}};
        } else if constexpr (std::is_same_v<T, CheckMultiAll>) {
          json keys = json::array();
          for (const auto& k : x.keys) keys.push_back(key_json(k));
          return json{{"op", "checkmultiall"}, {"slots", x.slots}, {"keys", keys}};
        } else if constexpr (std::is_same_v<T, PreimageHashEq>) {
          return json{{"op", "preimage"},
                      {"slot", x.slot},
                      {"hash", to_hex(x.hash)}};
        } else if constexpr (std::is_same_v<T, SizeGe>) {
          return json{{"op", "sizege"}, {"slot", x.slot}, {"min", x.min}};
        } else if constexpr (std::is_same_v<T, CmpEq>) {
          return json{{"op", "eq"}, {"lhs", sz_json(*x.lhs)}, {"rhs", sz_json(*x.rhs)}};
        } else if constexpr (std::is_same_v<T, CmpLt>) {
          return json{{"op", "lt"}, {"lhs", sz_json(*x.lhs)}, {"rhs", sz_json(*x.rhs)}};
        } else if constexpr (std::is_same_v<T, NotE>) {
          return json{{"op", "not"}, {"inner", script_json(*x.inner)}};
        } else if constexpr (std::is_same_v<T, BoolAnd>) {
          return json{{"op", "booland"},
                      {"lhs", script_json(*x.lhs)},
                      {"rhs", script_json(*x.rhs)}};
        } else if constexpr (std::is_same_v<T, BoolOr>) {
          return json{{"op", "boolor"},
                      {"lhs", script_json(*x.lhs)},
                      {"rhs", script_json(*x.rhs)}};
        } else if constexpr (std::is_same_v<T, AndE>) {
          json terms = json::array();
          for (const auto& t : x.terms) terms.push_back(script_json(*t));
          return json{{"op", "and"}, {"terms", terms}};
        } else {
          json branches = json::array();
          for (const auto& b : x.branches) branches.push_back(script_json(*b));
          return json{{"op", "or"},
                      {"selector", x.selector_slot},
                      {"branches", branches}};
        }
      },
      e.node);
}

}  // namespace

std::string dag_to_json(const TxDag& dag) {
  json doc;
  doc["fee_per_tx"] = dag.fee_per_tx;
  doc["total_fee_input"] = dag.total_fee_input;
  json templates = json::array();
  json edges = json::array();
  for (const auto& t : dag.templates) {
    json jt;
    jt["name"] = t.name;
    jt["locktime"] = t.locktime;
    json inputs = json::array();
    for (const auto& in : t.inputs) {
      json ji;
      if (auto* op = std::get_if<Outpoint>(&in.source)) {
        ji["source"] = json{{"kind", "external"}, {"txid", op->txid}, {"vout", op->vout}};
      } else {
        const auto& ref = std::get<InternalRef>(in.source);
        ji["source"] = json{{"kind", "internal"},
                            {"template", ref.template_name},
                            {"index", ref.index}};
        edges.push_back(json{{"from", ref.template_name},
                             {"to", t.name},
                             {"output", ref.index}});
      }
      json slots = json::array();
      for (const auto& s : in.witness_slots) {
        json js;
        js["name"] = s.name;
        switch (s.kind) {
          case SlotDesc::Kind::Signature:
            js["kind"] = "signature";
            js["key"] = key_json(s.key);
            break;
          case SlotDesc::Kind::Preimage:
            js["kind"] = "preimage";
            js["secret"] = s.secret;
            break;
          case SlotDesc::Kind::Selector:
            js["kind"] = "selector";
            break;
        }
        slots.push_back(std::move(js));
      }
      ji["slots"] = std::move(slots);
      ji["redeem_script"] =
          in.redeem_script ? script_json(*in.redeem_script) : json(nullptr);
      ji["selected_branch"] = in.selected_branch;
      inputs.push_back(std::move(ji));
    }
    jt["inputs"] = std::move(inputs);
    json outputs = json::array();
    for (const auto& o : t.outputs) {
      json jo;
      jo["value"] = o.value;
      if (auto* pkh = std::get_if<P2PKHPayout>(&o.payout)) {
        jo["kind"] = "p2pkh";
        jo["participant"] = pkh->participant;
      } else {
        jo["kind"] = "p2sh";
        jo["script"] = script_json(*std::get<P2SHPayout>(o.payout).script);
      }
      outputs.push_back(std::move(jo));
    }
    jt["outputs"] = std::move(outputs);
    templates.push_back(std::move(jt));
  }
  doc["templates"] = std::move(templates);
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

}  // namespace bitml
