#include "bitml/txwire.hpp"

#include <algorithm>
#include <cstring>
#include <map>

namespace bitml {

// ---------------------------------------------------------------------------
// Wire codec

namespace {

void put_u32(Bytes& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_u64(Bytes& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_compact(Bytes& out, uint64_t v) {
  if (v < 0xfd) {
    out.push_back(uint8_t(v));
  } else if (v <= 0xffff) {
    out.push_back(0xfd);
    out.push_back(uint8_t(v));
    out.push_back(uint8_t(v >> 8));
  } else if (v <= 0xffffffff) {
    out.push_back(0xfe);
    put_u32(out, uint32_t(v));
  } else {
    out.push_back(0xff);
    put_u64(out, v);
  }
}

struct Reader {
  std::span<const uint8_t> data;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > data.size()) throw MalformedBytes("truncated");
  }
  uint8_t u8() {
    need(1);
    return data[pos++];
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(data[pos++]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(data[pos++]) << (8 * i);
    return v;
  }
  uint64_t compact() {
    uint8_t tag = u8();
    if (tag < 0xfd) return tag;
    if (tag == 0xfd) {
      need(2);
      uint64_t v = data[pos] | uint64_t(data[pos + 1]) << 8;
      pos += 2;
      return v;
    }
    if (tag == 0xfe) return u32();
    return u64();
  }
  Bytes bytes(size_t n) {
    need(n);
    Bytes out(data.begin() + pos, data.begin() + pos + n);
    pos += n;
    return out;
  }
};

}  // namespace

Bytes serialize(const RawTx& tx) {
  Bytes out;
  put_u32(out, tx.version);
  put_compact(out, tx.inputs.size());
  for (const auto& in : tx.inputs) {
    out.insert(out.end(), in.prev_txid.begin(), in.prev_txid.end());
    put_u32(out, in.prev_vout);
    put_compact(out, in.script_sig.size());
    out.insert(out.end(), in.script_sig.begin(), in.script_sig.end());
    put_u32(out, in.sequence);
  }
  put_compact(out, tx.outputs.size());
  for (const auto& o : tx.outputs) {
    put_u64(out, uint64_t(o.value));
    put_compact(out, o.script_pubkey.size());
    out.insert(out.end(), o.script_pubkey.begin(), o.script_pubkey.end());
  }
  put_u32(out, tx.locktime);
  return out;
}

RawTx deserialize(std::span<const uint8_t> bytes) {
  Reader r{bytes};
  RawTx tx;
  tx.version = r.u32();
  uint64_t nin = r.compact();
  if (nin > 100000) throw MalformedBytes("input count");
  for (uint64_t i = 0; i < nin; ++i) {
    TxIn in;
    Bytes txidBytes = r.bytes(32);
    std::copy(txidBytes.begin(), txidBytes.end(), in.prev_txid.begin());
    in.prev_vout = r.u32();
    in.script_sig = r.bytes(r.compact());
    in.sequence = r.u32();
    tx.inputs.push_back(std::move(in));
  }
  uint64_t nout = r.compact();
  if (nout > 100000) throw MalformedBytes("output count");
  for (uint64_t i = 0; i < nout; ++i) {
    TxOut o;
    o.value = Satoshi(r.u64());
    o.script_pubkey = r.bytes(r.compact());
    tx.outputs.push_back(std::move(o));
  }
  tx.locktime = r.u32();
  if (r.pos != bytes.size()) throw MalformedBytes("trailing bytes");
  return tx;
}

Hash256 txid(const RawTx& tx) { return sha256d(serialize(tx)); }

std::string txid_hex(const RawTx& tx) {
  Hash256 id = txid(tx);
  std::reverse(id.begin(), id.end());
  return to_hex(id);
}

Hash256 sighash_all(const RawTx& tx, size_t input_index,
                    const Bytes& script_code) {
  if (input_index >= tx.inputs.size()) throw IndexOutOfRange(input_index);
  RawTx copy = tx;
  for (size_t i = 0; i < copy.inputs.size(); ++i)
    copy.inputs[i].script_sig = (i == input_index) ? script_code : Bytes{};
  Bytes bytes = serialize(copy);
  put_u32(bytes, 1);  // SIGHASH_ALL
  return sha256d(bytes);
}

// ---------------------------------------------------------------------------
// Script numbers

Bytes scriptnum_encode(int64_t v) {
  if (v == 0) return {};
  bool neg = v < 0;
  uint64_t mag = neg ? uint64_t(-(v + 1)) + 1 : uint64_t(v);
  Bytes out;
  while (mag) {
    out.push_back(uint8_t(mag & 0xff));
    mag >>= 8;
  }
  if (out.back() & 0x80)
    out.push_back(neg ? 0x80 : 0x00);
  else if (neg)
    out.back() |= 0x80;
  return out;
}

int64_t scriptnum_decode(std::span<const uint8_t> bytes) {
  if (bytes.empty()) return 0;
  if (bytes.size() > 8) throw MalformedBytes("script number too wide");
  uint64_t mag = 0;
  for (size_t i = 0; i < bytes.size(); ++i)
    mag |= uint64_t(i + 1 == bytes.size() ? bytes[i] & 0x7f : bytes[i])
           << (8 * i);
  bool neg = bytes.back() & 0x80;
  return neg ? -int64_t(mag) : int64_t(mag);
}

// ---------------------------------------------------------------------------
// Script assembly

namespace op {
constexpr uint8_t PUSHDATA1 = 0x4c, PUSHDATA2 = 0x4d, _1NEGATE = 0x4f,
                  _1 = 0x51, IF = 0x63, ELSE = 0x67, ENDIF = 0x68,
                  VERIFY = 0x69, TOALTSTACK = 0x6b, FROMALTSTACK = 0x6c,
                  DROP = 0x75, DUP = 0x76, PICK = 0x79, SIZE = 0x82,
                  EQUAL = 0x87, EQUALVERIFY = 0x88, NOT = 0x91, ADD = 0x93,
                  SUB = 0x94, BOOLAND = 0x9a, BOOLOR = 0x9b, NUMEQUAL = 0x9c,
                  LESSTHAN = 0x9f, GREATERTHANOREQUAL = 0xa2, SHA256 = 0xa8,
                  HASH160 = 0xa9, CHECKSIG = 0xac, CHECKMULTISIG = 0xae;
}  // namespace op

namespace {

struct ScriptWriter {
  Bytes out;

  void opc(uint8_t o) { out.push_back(o); }

  void push_data(std::span<const uint8_t> data) {
    if (data.size() > kMaxPushBytes) throw PushTooLarge(data.size());
    if (data.size() < 0x4c) {
      out.push_back(uint8_t(data.size()));
    } else if (data.size() <= 0xff) {
      out.push_back(op::PUSHDATA1);
      out.push_back(uint8_t(data.size()));
    } else {
      out.push_back(op::PUSHDATA2);
      out.push_back(uint8_t(data.size()));
      out.push_back(uint8_t(data.size() >> 8));
    }
    out.insert(out.end(), data.begin(), data.end());
  }

  void push_num(int64_t v) {
    if (v == 0) {
      out.push_back(0x00);
    } else if (v == -1) {
      out.push_back(op::_1NEGATE);
    } else if (v >= 1 && v <= 16) {
      out.push_back(uint8_t(op::_1 + v - 1));
    } else {
      push_data(scriptnum_encode(v));
    }
  }
};

void flatten_and(const ScriptExpr& e, std::vector<const ScriptExpr*>& out) {
  if (auto* a = std::get_if<AndE>(&e.node)) {
    for (const auto& t : a->terms) flatten_and(*t, out);
  } else {
    out.push_back(&e);
  }
}

bool uses_sizes(const ScriptExpr& e);

bool sz_uses_sizes(const SzExpr& e) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SzSize>) return true;
        else if constexpr (std::is_same_v<T, SzAdd> || std::is_same_v<T, SzSub>)
          return sz_uses_sizes(*x.lhs) || sz_uses_sizes(*x.rhs);
        else
          return false;
      },
      e.node);
}

bool uses_sizes(const ScriptExpr& e) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SizeGe>) return true;
        else if constexpr (std::is_same_v<T, CmpEq> || std::is_same_v<T, CmpLt>)
          return sz_uses_sizes(*x.lhs) || sz_uses_sizes(*x.rhs);
        else if constexpr (std::is_same_v<T, NotE>)
          return uses_sizes(*x.inner);
        else if constexpr (std::is_same_v<T, BoolAnd> || std::is_same_v<T, BoolOr>)
          return uses_sizes(*x.lhs) || uses_sizes(*x.rhs);
        else if constexpr (std::is_same_v<T, AndE>) {
          for (const auto& t : x.terms)
            if (uses_sizes(*t)) return true;
          return false;
        } else {
          return false;
        }
      },
      e.node);
}

// Lowers one conjunct. Preimage checks stash the raw preimage sizes on the
// altstack; once the last preimage is consumed they are moved to the main
// stack as a small environment addressed with depth-computed OP_PICK.
struct ConjunctAsm {
  ScriptWriter& w;
  std::map<std::string, int> envPos;  // slot -> depth from env top
  bool envActive = false;

  void run(const ScriptExpr& conjunct) {
    std::vector<const ScriptExpr*> terms;
    flatten_and(conjunct, terms);
    if (terms.size() == 1 && std::holds_alternative<TrueE>(terms[0]->node)) {
      w.opc(op::_1);
      return;
    }
    std::vector<const ScriptExpr*> preTerms;
    for (const auto* t : terms)
      if (std::holds_alternative<PreimageHashEq>(t->node)) preTerms.push_back(t);
    bool needEnv = false;
    for (const auto* t : terms) needEnv = needEnv || uses_sizes(*t);

    size_t preSeen = 0;
    for (const auto* t : terms) {
      if (auto* pre = std::get_if<PreimageHashEq>(&t->node)) {
        w.opc(op::SIZE);
        w.opc(op::TOALTSTACK);
        w.opc(op::SHA256);
        w.push_data(pre->hash);
        w.opc(op::EQUALVERIFY);
        ++preSeen;
        if (preSeen == preTerms.size() && needEnv) {
          for (size_t i = 0; i < preTerms.size(); ++i) w.opc(op::FROMALTSTACK);
          // first preimage's size ends on top
          for (size_t i = 0; i < preTerms.size(); ++i) {
            const auto& slot = std::get<PreimageHashEq>(preTerms[i]->node).slot;
            envPos[slot] = int(i);
          }
          envActive = true;
        }
      } else {
        expr(*t, 0);
        w.opc(op::VERIFY);
      }
    }
    w.opc(op::_1);
  }

  void pick_size(const std::string& slot, int d) {
    auto it = envPos.find(slot);
    if (!envActive || it == envPos.end())
      throw std::logic_error("size reference to undeclared preimage slot: " +
                             slot);
    w.push_num(it->second + d);
    w.opc(op::PICK);
  }

  void sz(const SzExpr& e, int d) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SzConst>) {
            w.push_num(x.value);
          } else if constexpr (std::is_same_v<T, SzSize>) {
            pick_size(x.slot, d);
          } else {
            sz(*x.lhs, d);
            sz(*x.rhs, d + 1);
            w.opc(std::is_same_v<T, SzAdd> ? op::ADD : op::SUB);
          }
        },
        e.node);
  }

  void expr(const ScriptExpr& e, int d) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, TrueE>) {
            w.opc(op::_1);
          } else if constexpr (std::is_same_v<T, CheckSig>) {
            w.push_data(derive_pubkey(x.key));
            w.opc(op::CHECKSIG);
          } else if constexpr (std::is_same_v<T, CheckMultiAll>) {
            if (x.keys.size() > kMaxMultisigKeys) throw TooManyKeys(x.keys.size());
            w.push_num(int64_t(x.keys.size()));
            for (const auto& k : x.keys) w.push_data(derive_pubkey(k));
            w.push_num(int64_t(x.keys.size()));
            w.opc(op::CHECKMULTISIG);
          } else if constexpr (std::is_same_v<T, PreimageHashEq>) {
            w.opc(op::SHA256);
            w.push_data(x.hash);
            w.opc(op::EQUAL);
          } else if constexpr (std::is_same_v<T, SizeGe>) {
            pick_size(x.slot, d);
            w.push_num(x.min);
            w.opc(op::GREATERTHANOREQUAL);
          } else if constexpr (std::is_same_v<T, CmpEq>) {
            sz(*x.lhs, d);
            sz(*x.rhs, d + 1);
            w.opc(op::NUMEQUAL);
          } else if constexpr (std::is_same_v<T, CmpLt>) {
            sz(*x.lhs, d);
            sz(*x.rhs, d + 1);
            w.opc(op::LESSTHAN);
          } else if constexpr (std::is_same_v<T, NotE>) {
            expr(*x.inner, d);
            w.opc(op::NOT);
          } else if constexpr (std::is_same_v<T, BoolAnd>) {
            expr(*x.lhs, d);
            expr(*x.rhs, d + 1);
            w.opc(op::BOOLAND);
          } else if constexpr (std::is_same_v<T, BoolOr>) {
            expr(*x.lhs, d);
            expr(*x.rhs, d + 1);
            w.opc(op::BOOLOR);
          } else {
            throw std::logic_error("nested AndE/OrE in expression position");
          }
        },
        e.node);
  }
};

}  // namespace

Bytes assemble_script(const ScriptExpr& e) {
  ScriptWriter w;
  if (auto* orE = std::get_if<OrE>(&e.node)) {
    size_t n = orE->branches.size();
    for (size_t i = 0; i + 1 < n; ++i) {
      w.opc(op::DUP);
      w.push_num(int64_t(i));
      w.opc(op::NUMEQUAL);
      w.opc(op::IF);
      w.opc(op::DROP);
      ConjunctAsm{w}.run(*orE->branches[i]);
      w.opc(op::ELSE);
    }
    w.opc(op::DROP);
    ConjunctAsm{w}.run(*orE->branches[n - 1]);
    for (size_t i = 0; i + 1 < n; ++i) w.opc(op::ENDIF);
  } else {
    ConjunctAsm{w}.run(e);
  }
  return w.out;
}

std::vector<std::string> witness_plan(const ScriptExpr& e, int selected_branch) {
  std::vector<std::string> consumption;  // stack pop order (top first)
  auto add_conjunct = [&](const ScriptExpr& c) {
    std::vector<const ScriptExpr*> terms;
    flatten_and(c, terms);
    for (const auto* t : terms) {
      if (auto* m = std::get_if<CheckMultiAll>(&t->node)) {
        for (auto it = m->slots.rbegin(); it != m->slots.rend(); ++it)
          consumption.push_back(*it);
      } else if (auto* s = std::get_if<CheckSig>(&t->node)) {
        consumption.push_back(s->slot);
      } else if (auto* p = std::get_if<PreimageHashEq>(&t->node)) {
        consumption.push_back(p->slot);
      }
    }
  };
  if (auto* orE = std::get_if<OrE>(&e.node)) {
    consumption.push_back(orE->selector_slot);
    size_t idx = (selected_branch >= 0 &&
                  size_t(selected_branch) < orE->branches.size())
                     ? size_t(selected_branch)
                     : orE->branches.size() - 1;
    add_conjunct(*orE->branches[idx]);
  } else {
    add_conjunct(e);
  }
  std::reverse(consumption.begin(), consumption.end());
  return consumption;
}

// ---------------------------------------------------------------------------
// Tree-level interpreter

namespace {

int64_t eval_sz(const SzExpr& e, const std::map<std::string, Bytes>& witness) {
  return std::visit(
      [&](const auto& x) -> int64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SzConst>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, SzSize>) {
          auto it = witness.find(x.slot);
          if (it == witness.end()) throw MissingSlot(x.slot);
          return int64_t(it->second.size());
        } else if constexpr (std::is_same_v<T, SzAdd>) {
          return eval_sz(*x.lhs, witness) + eval_sz(*x.rhs, witness);
        } else {
          return eval_sz(*x.lhs, witness) - eval_sz(*x.rhs, witness);
        }
      },
      e.node);
}

}  // namespace

bool interpret(const ScriptExpr& e, const std::map<std::string, Bytes>& witness,
               const SigCheckContext& ctx) {
  auto get = [&](const std::string& slot) -> const Bytes& {
    auto it = witness.find(slot);
    if (it == witness.end()) throw MissingSlot(slot);
    return it->second;
  };
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TrueE>) {
          return true;
        } else if constexpr (std::is_same_v<T, CheckSig>) {
          return ctx.check(x.key, get(x.slot));
        } else if constexpr (std::is_same_v<T, CheckMultiAll>) {
          for (size_t i = 0; i < x.keys.size(); ++i)
            if (!ctx.check(x.keys[i], get(x.slots[i]))) return false;
          return true;
        } else if constexpr (std::is_same_v<T, PreimageHashEq>) {
          return sha256(get(x.slot)) == x.hash;
        } else if constexpr (std::is_same_v<T, SizeGe>) {
          return int64_t(get(x.slot).size()) >= x.min;
        } else if constexpr (std::is_same_v<T, CmpEq>) {
          return eval_sz(*x.lhs, witness) == eval_sz(*x.rhs, witness);
        } else if constexpr (std::is_same_v<T, CmpLt>) {
          return eval_sz(*x.lhs, witness) < eval_sz(*x.rhs, witness);
        } else if constexpr (std::is_same_v<T, NotE>) {
          return !interpret(*x.inner, witness, ctx);
        } else if constexpr (std::is_same_v<T, BoolAnd>) {
          return interpret(*x.lhs, witness, ctx) &&
                 interpret(*x.rhs, witness, ctx);
        } else if constexpr (std::is_same_v<T, BoolOr>) {
          return interpret(*x.lhs, witness, ctx) ||
                 interpret(*x.rhs, witness, ctx);
        } else if constexpr (std::is_same_v<T, AndE>) {
          for (const auto& t : x.terms)
            if (!interpret(*t, witness, ctx)) return false;
          return true;
        } else {
          // selector rule mirrors the assembled if/else ladder: any value
          // other than a leading branch index lands in the last branch
          int64_t v = scriptnum_decode(get(x.selector_slot));
          size_t n = x.branches.size();
          size_t idx = (v >= 0 && uint64_t(v) < n - 1) ? size_t(v) : n - 1;
          return interpret(*x.branches[idx], witness, ctx);
        }
      },
      e.node);
}

// ---------------------------------------------------------------------------
// Signing

Bytes derive_pubkey(const KeyRef& key) {
  std::string seed = "bitml-testkey:" + key.id();
  Hash256 h = sha256(std::span(reinterpret_cast<const uint8_t*>(seed.data()),
                               seed.size()));
  Bytes pk;
  pk.push_back(0x02);
  pk.insert(pk.end(), h.begin(), h.end());
  return pk;
}

Bytes TestSigner::pubkey(const KeyRef& key) const { return derive_pubkey(key); }

Bytes TestSigner::sign(const KeyRef& key, const Hash256& digest) const {
  Bytes msg = derive_pubkey(key);
  msg.insert(msg.end(), digest.begin(), digest.end());
  Hash256 h = sha256(msg);
  Bytes sig(h.begin(), h.end());
  sig.push_back(0x01);  // SIGHASH_ALL marker, as in real signatures
  return sig;
}

bool TestSigner::verify(std::span<const uint8_t> pubkey,
                        std::span<const uint8_t> sig, const Hash256& digest) {
  if (sig.size() != 33 || sig[32] != 0x01) return false;
  Bytes msg(pubkey.begin(), pubkey.end());
  msg.insert(msg.end(), digest.begin(), digest.end());
  Hash256 h = sha256(msg);
  return std::equal(h.begin(), h.end(), sig.begin());
}

Bytes p2pkh_script(std::span<const uint8_t> pubkey) {
  Hash160 h = hash160(pubkey);
  Bytes s;
  s.push_back(op::DUP);
  s.push_back(op::HASH160);
  s.push_back(20);
  s.insert(s.end(), h.begin(), h.end());
  s.push_back(op::EQUALVERIFY);
  s.push_back(op::CHECKSIG);
  return s;
}

Bytes p2sh_script(std::span<const uint8_t> redeem_script) {
  Hash160 h = hash160(redeem_script);
  Bytes s;
  s.push_back(op::HASH160);
  s.push_back(20);
  s.insert(s.end(), h.begin(), h.end());
  s.push_back(op::EQUAL);
  return s;
}

// ---------------------------------------------------------------------------
// finalize

namespace {

Hash256 outpoint_txid(const std::string& displayHex) {
  Bytes bytes = from_hex(displayHex);
  Hash256 id{};
  if (bytes.size() == 32) {
    std::reverse(bytes.begin(), bytes.end());
    std::copy(bytes.begin(), bytes.end(), id.begin());
  }
  return id;
}

}  // namespace

std::vector<RawTx> finalize(const TxDag& dag, const Signer& signer,
                            const std::map<std::string, Bytes>& preimages) {
  auto violations = check_standardness(dag);
  if (!violations.empty()) throw StandardnessError(std::move(violations));

  std::map<std::string, Hash256> txids;
  std::vector<RawTx> out;

  for (const auto& t : dag.templates) {
    RawTx tx;
    tx.version = 2;
    tx.locktime = uint32_t(t.locktime);
    uint32_t sequence = t.locktime > 0 ? 0xFFFFFFFE : 0xFFFFFFFF;

    std::vector<Bytes> redeemBytes(t.inputs.size());
    for (size_t i = 0; i < t.inputs.size(); ++i) {
      const auto& in = t.inputs[i];
      TxIn raw;
      raw.sequence = sequence;
      if (auto* ext = std::get_if<Outpoint>(&in.source)) {
        raw.prev_txid = outpoint_txid(ext->txid);
        raw.prev_vout = ext->vout;
      } else {
        const auto& ref = std::get<InternalRef>(in.source);
        raw.prev_txid = txids.at(ref.template_name);
        raw.prev_vout = ref.index;
      }
      if (in.redeem_script) redeemBytes[i] = assemble_script(*in.redeem_script);
      tx.inputs.push_back(std::move(raw));
    }

    for (const auto& o : t.outputs) {
      TxOut raw;
      raw.value = o.value;
      if (auto* pkh = std::get_if<P2PKHPayout>(&o.payout)) {
        Bytes pk = from_hex(dag.participant_pubkeys.at(pkh->participant));
        raw.script_pubkey = p2pkh_script(pk);
      } else {
        Bytes redeem =
            assemble_script(*std::get<P2SHPayout>(o.payout).script);
        raw.script_pubkey = p2sh_script(redeem);
      }
      tx.outputs.push_back(std::move(raw));
    }

    for (size_t i = 0; i < t.inputs.size(); ++i) {
      const auto& in = t.inputs[i];
      ScriptWriter sw;
      if (in.redeem_script) {
        Hash256 digest = sighash_all(tx, i, redeemBytes[i]);
        for (const auto& slot : in.witness_slots) {
          switch (slot.kind) {
            case SlotDesc::Kind::Signature:
              sw.push_data(signer.sign(slot.key, digest));
              break;
            case SlotDesc::Kind::Preimage: {
              auto it = preimages.find(slot.secret);
              sw.push_data(it != preimages.end() ? it->second : Bytes{});
              break;
            }
            case SlotDesc::Kind::Selector:
              sw.push_num(in.selected_branch);
              break;
          }
        }
        sw.push_data(redeemBytes[i]);
      } else {
        // external deposit, spent as P2PKH with the owner's deposit key
        const KeyRef& key = in.witness_slots.at(0).key;
        Bytes pk = signer.pubkey(key);
        Hash256 digest = sighash_all(tx, i, p2pkh_script(pk));
        sw.push_data(signer.sign(key, digest));
        sw.push_data(pk);
      }
      tx.inputs[i].script_sig = std::move(sw.out);
    }

    txids[t.name] = txid(tx);
    out.push_back(std::move(tx));
  }
  return out;
}

}  // namespace bitml
