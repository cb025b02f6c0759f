#include "pvd/primitives.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace pvd {

Bytes sha256(const Bytes& data) {
  Bytes out(32);
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("sha256: EVP_MD_CTX_new failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest failed");
  }
  EVP_MD_CTX_free(ctx);
  return out;
}

BitString kdf_bits(const std::string& domain, const Bytes& context,
                   std::size_t nbits) {
  Bytes stream;
  for (std::uint32_t block = 0; stream.size() * 8 < nbits; ++block) {
    ByteWriter w;
    w.block(domain);
    w.u32(block);
    w.block(context);
    const Bytes h = sha256(w.take());
    stream.insert(stream.end(), h.begin(), h.end());
  }
  return BitString::from_bytes(stream, nbits);
}

// --- one-way functions -------------------------------------------------------

Owf::Owf(std::size_t n, std::size_t m) : n_(n), m_(m) {
  if (n < 1 || m < 1) throw std::invalid_argument("Owf: empty domain or range");
}

std::vector<BitString> Owf::preimages(const BitString&) const {
  throw std::logic_error("preimages: function is not enumerable");
}

namespace {

class HashOwf final : public Owf {
 public:
  HashOwf(std::size_t n, std::size_t m) : Owf(n, m) {
    if (m > 4096) throw std::invalid_argument("owf_hash: m too large");
  }

  std::string name() const override { return "hash"; }

  BitString eval(const BitString& x) const override {
    if (x.size() != input_bits())
      throw std::invalid_argument("owf eval: wrong input length");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(input_bits()));
    w.u32(static_cast<std::uint32_t>(output_bits()));
    w.bits(x);
    return kdf_bits("pvd.owf.hash.v1", w.take(), output_bits());
  }
};

class ToyOwf final : public Owf {
 public:
  ToyOwf(std::size_t n, std::size_t m, std::uint64_t seed) : Owf(n, m) {
    if (n > 16) throw std::invalid_argument("owf_toy: n > 16");
    if (m > 512) throw std::invalid_argument("owf_toy: m too large");
    const SplitRng base(seed);
    table_.reserve(std::size_t{1} << n);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      table_.push_back(base.fork(x).bits(m));
      inverse_[table_.back()].push_back(BitString::from_index(x, n));
    }
  }

  std::string name() const override { return "toy"; }
  bool enumerable() const override { return true; }

  BitString eval(const BitString& x) const override {
    if (x.size() != input_bits())
      throw std::invalid_argument("owf eval: wrong input length");
    return table_[x.index()];
  }

  std::vector<BitString> preimages(const BitString& y) const override {
    if (y.size() != output_bits())
      throw std::invalid_argument("preimages: wrong output length");
    auto it = inverse_.find(y);
    return it == inverse_.end() ? std::vector<BitString>{} : it->second;
  }

 private:
  std::vector<BitString> table_;
  std::map<BitString, std::vector<BitString>> inverse_;  // values ascending
};

}  // namespace

OwfPtr owf_hash(std::size_t n, std::size_t m) {
  return std::make_shared<HashOwf>(n, m);
}

OwfPtr owf_toy(std::size_t n, std::size_t m, std::uint64_t seed) {
  return std::make_shared<ToyOwf>(n, m, seed);
}

// --- group arithmetic helpers ---------------------------------------------------

namespace {

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

Bytes mpz_to_bytes(const mpz_class& v, std::size_t width) {
  Bytes out(width, 0);
  std::size_t count = 0;
  mpz_export(out.data() + (width - (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8),
             &count, 1, 1, 0, 0, v.get_mpz_t());
  return out;
}

mpz_class mpz_from_bytes(const Bytes& b) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), b.size(), 1, 1, 0, 0, b.data());
  return v;
}

mpz_class rand_below(SplitRng& rng, const mpz_class& bound) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t nbytes = (bits + 7) / 8;
  while (true) {
    Bytes buf(nbytes);
    for (std::size_t i = 0; i < nbytes; ++i) {
      if (i % 8 == 0) {
        const std::uint64_t word = rng.next_u64();
        for (std::size_t j = 0; j < 8 && i + j < nbytes; ++j)
          buf[i + j] = std::uint8_t(word >> (8 * j));
      }
    }
    buf[0] &= std::uint8_t(0xFFu >> (8 * nbytes - bits));
    mpz_class v = mpz_from_bytes(buf);
    if (v < bound) return v;
  }
}

}  // namespace

GroupParams GroupParams::preset(const std::string& name) {
  GroupParams out;
  out.label = name;
  out.g = 4;
  if (name == "tiny64") {
    out.p = mpz_class("0x8000000000000A77");
  } else if (name == "small256") {
    out.p = mpz_class(
        "0x800000000000000000000000000000000000000000000000000000000002FF7F");
  } else if (name == "modp2048") {
    out.p = mpz_class(
        "0xFFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
        "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
        "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
        "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
        "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
        "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
        "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
        "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF");
  } else {
    throw std::invalid_argument(
        "unknown group preset '" + name + "' (tiny64, small256, modp2048)");
  }
  out.q = (out.p - 1) / 2;
  return out;
}

void GroupParams::validate() const {
  if (p < 7 || q != (p - 1) / 2)
    throw std::invalid_argument("group: p must be a safe prime 2q+1");
  if (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0)
    throw std::invalid_argument("group: p is composite");
  if (mpz_probab_prime_p(q.get_mpz_t(), 30) == 0)
    throw std::invalid_argument("group: q is composite");
  if (g < 2 || g > p - 2) throw std::invalid_argument("group: g out of range");
  if (powm(g, q, p) != 1)
    throw std::invalid_argument("group: g not in the order-q subgroup");
}

// --- hashed ElGamal ------------------------------------------------------------

namespace {

class GroupPke final : public Pke {
 public:
  explicit GroupPke(GroupParams prm) : prm_(std::move(prm)) {
    prm_.validate();
    width_ = (mpz_sizeinbase(prm_.p.get_mpz_t(), 2) + 7) / 8;
  }

  std::string name() const override { return "group:" + prm_.label; }

  PkeKeyPair keygen(SplitRng& rng) const override {
    const mpz_class sk = rand_below(rng, prm_.q - 1) + 1;  // [1, q)
    const mpz_class pk = powm(prm_.g, sk, prm_.p);
    PkeKeyPair out;
    ByteWriter wp;
    wp.block(prm_.label);
    wp.block(mpz_to_bytes(pk, width_));
    out.pk = wp.take();
    ByteWriter ws;
    ws.block(prm_.label);
    ws.block(mpz_to_bytes(sk, width_));
    out.sk = ws.take();
    return out;
  }

  Bytes enc(const Bytes& pk_bytes, const BitString& msg,
            SplitRng& rng) const override {
    const mpz_class pk = parse_key(pk_bytes, "public key");
    check_element(pk, "public key");
    const mpz_class r = rand_below(rng, prm_.q - 1) + 1;
    const mpz_class c1 = powm(prm_.g, r, prm_.p);
    const mpz_class shared = powm(pk, r, prm_.p);
    const BitString c2 = msg ^ mask(c1, shared, msg.size());
    ByteWriter w;
    w.u8(kCtTagGroup);
    w.block(mpz_to_bytes(c1, width_));
    w.bits(c2);
    return w.take();
  }

  BitString dec(const Bytes& sk_bytes, const Bytes& ct) const override {
    const mpz_class sk = parse_key(sk_bytes, "secret key");
    ByteReader r(ct);
    if (r.u8() != kCtTagGroup)
      throw std::invalid_argument("dec: not a group ciphertext");
    const mpz_class c1 = mpz_from_bytes(r.block());
    const BitString c2 = r.bits();
    r.expect_done();
    check_element(c1, "ciphertext");
    const mpz_class shared = powm(c1, sk, prm_.p);
    return c2 ^ mask(c1, shared, c2.size());
  }

 private:
  mpz_class parse_key(const Bytes& key, const char* what) const {
    ByteReader r(key);
    if (r.block_str() != prm_.label)
      throw std::invalid_argument(std::string(what) + ": group label mismatch");
    mpz_class v = mpz_from_bytes(r.block());
    r.expect_done();
    return v;
  }

  void check_element(const mpz_class& v, const char* what) const {
    if (v < 2 || v > prm_.p - 2 || powm(v, prm_.q, prm_.p) != 1)
      throw std::invalid_argument(std::string(what) + ": not a group element");
  }

  BitString mask(const mpz_class& c1, const mpz_class& shared,
                 std::size_t nbits) const {
    ByteWriter w;
    w.block(prm_.label);
    w.block(mpz_to_bytes(c1, width_));
    w.block(mpz_to_bytes(shared, width_));
    w.u32(static_cast<std::uint32_t>(nbits));
    return kdf_bits("pvd.pke.group.v1", w.take(), nbits);
  }

  GroupParams prm_;
  std::size_t width_;
};

class TransparentPke final : public Pke {
 public:
  std::string name() const override { return "transparent"; }

  PkeKeyPair keygen(SplitRng&) const override { return {}; }

  Bytes enc(const Bytes&, const BitString& msg, SplitRng&) const override {
    ByteWriter w;
    w.u8(kCtTagClear);
    w.bits(msg);
    return w.take();
  }

  BitString dec(const Bytes&, const Bytes& ct) const override {
    ByteReader r(ct);
    if (r.u8() != kCtTagClear)
      throw std::invalid_argument("dec: not a transparent ciphertext");
    BitString msg = r.bits();
    r.expect_done();
    return msg;
  }
};

}  // namespace

PkePtr pke_group(const GroupParams& params) {
  return std::make_shared<GroupPke>(params);
}

PkePtr pke_transparent() { return std::make_shared<TransparentPke>(); }

// --- commitment ------------------------------------------------------------------

namespace {

Bytes commit_digest(const BitString& value, const Bytes& r) {
  ByteWriter w;
  w.block(std::string("pvd.commit.v1"));
  w.block(r);
  w.bits(value);
  return sha256(w.take());
}

}  // namespace

Commitment commit(const BitString& value, SplitRng& rng) {
  Commitment c;
  c.opening.resize(32);
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t word = rng.next_u64();
    for (int j = 0; j < 8; ++j) c.opening[8 * i + j] = std::uint8_t(word >> (8 * j));
  }
  c.digest = commit_digest(value, c.opening);
  return c;
}

bool commit_verify(const Bytes& digest, const BitString& value,
                   const Bytes& opening) {
  return digest == commit_digest(value, opening);
}

// --- semantic wrapper ---------------------------------------------------------------

SemanticWrapper SemanticWrapper::transparent() {
  SemanticWrapper sw;
  sw.kind = WrapperKind::transparent;
  return sw;
}

SemanticWrapper SemanticWrapper::with_pke(const Pke& pke, Bytes pk) {
  SemanticWrapper sw;
  sw.kind = WrapperKind::pke;
  sw.pke = &pke;
  sw.pk = std::move(pk);
  return sw;
}

SemanticWrapper SemanticWrapper::committing() {
  SemanticWrapper sw;
  sw.kind = WrapperKind::commitment;
  return sw;
}

WrappedInstance wrap(const SemanticWrapper& sw, const BitString& z,
                     const Bytes& aux0, const Bytes& aux1,
                     TwoBranchState quantum, SplitRng& rng) {
  WrappedInstance out{.payload = {},
                      .payload_key = {},
                      .secret_opening = {},
                      .aux0 = aux0,
                      .aux1 = aux1,
                      .quantum = std::move(quantum)};
  switch (sw.kind) {
    case WrapperKind::transparent: {
      ByteWriter w;
      w.bits(z);
      out.payload = w.take();
      break;
    }
    case WrapperKind::pke:
      if (!sw.pke) throw std::invalid_argument("wrap: pke wrapper without scheme");
      out.payload = sw.pke->enc(sw.pk, z, rng);
      out.payload_key = sw.pk;
      break;
    case WrapperKind::commitment: {
      Commitment c = commit(z, rng);
      out.payload = std::move(c.digest);
      out.secret_opening = std::move(c.opening);
      break;
    }
  }
  return out;
}

// --- one-way state generators ----------------------------------------------------------

Owsg::Owsg(std::size_t n, int m) : n_(n), m_(m) {
  if (n < 1) throw std::invalid_argument("Owsg: empty key space");
  if (m < 1 || m > kDenseCap)
    throw std::invalid_argument("Owsg: state register out of range");
}

double Owsg::accept_probability(const BitString& k_prime,
                                const DenseState& phi) const {
  if (phi.qubits() != m_)
    throw std::invalid_argument("ver: state register size mismatch");
  // |<a|b>|^2 of unit vectors can land an ulp above 1; keep it a probability.
  return std::clamp(std::norm(stategen(k_prime).inner(phi)), 0.0, 1.0);
}

bool Owsg::ver(const BitString& k_prime, const DenseState& phi,
               SplitRng& rng) const {
  return rng.uniform() < accept_probability(k_prime, phi);
}

namespace {

class ToyOwsg final : public Owsg {
 public:
  ToyOwsg(std::size_t n, int m, std::uint64_t seed)
      : Owsg(n, m), seed_(seed) {
    if (n > 48) throw std::invalid_argument("owsg_toy: n too large");
  }

  std::string name() const override { return "toy"; }

  DenseState stategen(const BitString& k) const override {
    if (k.size() != key_bits())
      throw std::invalid_argument("stategen: wrong key length");
    std::uint64_t high = 0;
    for (std::size_t i = 0; i + 1 < k.size(); ++i)
      high = (high << 1) | std::uint64_t(k.bit(i));
    DenseState s = DenseState::basis(state_qubits(),
                                     std::uint64_t(k.bit(k.size() - 1)));
    SplitRng rng = SplitRng(seed_).fork(high);
    for (int layer = 0; layer < 2; ++layer) {
      for (int q = 0; q < state_qubits(); ++q) {
        s.apply_ry(q, 2.0 * std::numbers::pi * rng.uniform());
        s.apply_rz(q, 2.0 * std::numbers::pi * rng.uniform());
      }
      for (int q = 0; q + 1 < state_qubits(); ++q) s.apply_cz(q, q + 1);
    }
    return s;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace

OwsgPtr owsg_toy(std::size_t n, int m, std::uint64_t seed) {
  return std::make_shared<ToyOwsg>(n, m, seed);
}

BitString sibling_key(const BitString& k) {
  if (k.empty()) throw std::invalid_argument("sibling_key: empty key");
  BitString out = k;
  out.set_bit(k.size() - 1, 1 - k.bit(k.size() - 1));
  return out;
}

}  // namespace pvd
