#include "pvd/compiler.hpp"

#include <stdexcept>

namespace pvd {

std::pair<BitString, BitString> sample_branch_pair(std::size_t n,
                                                   SplitRng& rng) {
  if (n < 1) throw std::invalid_argument("sample_branch_pair: n must be >= 1");
  const BitString x0 = rng.bits(n);
  BitString x1 = rng.bits(n);
  while (x1 == x0) x1 = rng.bits(n);
  return {x0, x1};
}

PvdKeyPair pv_gen(const Pke& pke, SplitRng& rng) {
  const PkeKeyPair kp = pke.keygen(rng);
  return {kp.pk, kp.sk};
}

std::pair<PvdVerificationKey, WrappedInstance> compile(const SemanticWrapper& sw,
                                                       const Owf& f, int b,
                                                       SplitRng& rng) {
  if (b != 0 && b != 1) throw std::invalid_argument("compile: b must be 0 or 1");
  const auto [x0, x1] = sample_branch_pair(f.input_bits(), rng);
  const BitString y0 = f.eval(x0), y1 = f.eval(x1);
  PvdVerificationKey vk;
  vk.classical = {y0, y1};
  ByteWriter a0, a1;
  a0.bits(y0);
  a1.bits(y1);
  WrappedInstance wi = wrap(sw, x0 ^ x1, a0.take(), a1.take(),
                            TwoBranchState(x0, x1, b), rng);
  return {std::move(vk), std::move(wi)};
}

std::pair<PvdVerificationKey, WrappedInstance> compile_owsg(
    const SemanticWrapper& sw, const Owsg& g, int b, int t, SplitRng& rng) {
  if (b != 0 && b != 1) throw std::invalid_argument("compile: b must be 0 or 1");
  if (t < 1) throw std::invalid_argument("compile: copy count t must be >= 1");
  const auto [x0, x1] = sample_branch_pair(g.key_bits(), rng);
  PvdVerificationKey vk;
  vk.quantum.emplace();
  vk.quantum->copies0.assign(t, g.stategen(x0));
  vk.quantum->copies1.assign(t, g.stategen(x1));
  WrappedInstance wi =
      wrap(sw, x0 ^ x1, {}, {}, TwoBranchState(x0, x1, b), rng);
  return {std::move(vk), std::move(wi)};
}

std::pair<PvdVerificationKey, PvdCiphertext> pv_enc(const Pke& pke,
                                                    const Bytes& pk,
                                                    const Owf& f, int b,
                                                    SplitRng& rng) {
  auto [vk, wi] = compile(SemanticWrapper::with_pke(pke, pk), f, b, rng);
  return {std::move(vk),
          PvdCiphertext{std::move(wi.payload), QuantumPart(std::move(wi.quantum))}};
}

std::pair<PvdVerificationKey, PvdCiphertext> pv_enc_owsg(const Pke& pke,
                                                         const Bytes& pk,
                                                         const Owsg& g, int b,
                                                         int t, SplitRng& rng) {
  auto [vk, wi] =
      compile_owsg(SemanticWrapper::with_pke(pke, pk), g, b, t, rng);
  return {std::move(vk),
          PvdCiphertext{std::move(wi.payload), QuantumPart(std::move(wi.quantum))}};
}

int pv_dec(const Pke& pke, const Bytes& sk, PvdCiphertext& ct, SplitRng& rng) {
  const BitString z = pke.dec(sk, ct.classical_part);
  const TwoBranchState s = ct.quantum_part.take();
  if (z.size() != s.n())
    throw std::runtime_error("pv_dec: plaintext length does not match register");
  return decrypt_bit(z, hadamard_measure(s, rng));
}

DeletionCertificate pv_del(PvdCiphertext& ct, SplitRng& rng) {
  const TwoBranchState s = ct.quantum_part.take();
  return {computational_measure(s, rng)};
}

bool pv_vrfy(const Owf& f, const PvdVerificationKey& vk,
             const DeletionCertificate& cert) {
  if (!vk.classical)
    throw std::invalid_argument("pv_vrfy: verification key is not classical");
  const BitString y = f.eval(cert.pi);
  return y == vk.classical->first || y == vk.classical->second;
}

bool pv_vrfy_owsg(const Owsg& g, PvdVerificationKey& vk,
                  const DeletionCertificate& cert, SplitRng& rng) {
  if (!vk.quantum)
    throw std::invalid_argument("pv_vrfy: verification key is not quantum");
  auto sub_check = [&](std::vector<DenseState>& copies) {
    if (copies.empty())
      throw std::runtime_error("pv_vrfy: verification copies exhausted");
    const DenseState copy = std::move(copies.back());
    copies.pop_back();
    return g.ver(cert.pi, copy, rng);
  };
  if (sub_check(vk.quantum->copies0)) return true;
  return sub_check(vk.quantum->copies1);
}

// --- serialization -------------------------------------------------------------

namespace {

constexpr std::uint8_t kVkTagClassical = 1;

}  // namespace

Bytes serialize_keypair(const PvdKeyPair& kp) {
  ByteWriter w;
  w.block(kp.pk);
  w.block(kp.sk);
  return w.take();
}

PvdKeyPair parse_keypair(const Bytes& b) {
  ByteReader r(b);
  PvdKeyPair kp;
  kp.pk = r.block();
  kp.sk = r.block();
  r.expect_done();
  return kp;
}

Bytes serialize_vk(const PvdVerificationKey& vk) {
  if (!vk.classical)
    throw std::logic_error("serialize_vk: quantum keys cannot be serialized");
  ByteWriter w;
  w.u8(kVkTagClassical);
  w.bits(vk.classical->first);
  w.bits(vk.classical->second);
  return w.take();
}

PvdVerificationKey parse_vk(const Bytes& b) {
  ByteReader r(b);
  if (r.u8() != kVkTagClassical)
    throw std::runtime_error("parse_vk: unknown tag");
  PvdVerificationKey vk;
  BitString y0 = r.bits(), y1 = r.bits();
  r.expect_done();
  vk.classical = {std::move(y0), std::move(y1)};
  return vk;
}

Bytes serialize_certificate(const DeletionCertificate& cert) {
  ByteWriter w;
  w.bits(cert.pi);
  return w.take();
}

DeletionCertificate parse_certificate(const Bytes& b) {
  ByteReader r(b);
  DeletionCertificate cert{r.bits()};
  r.expect_done();
  return cert;
}

Bytes serialize_ciphertext(const PvdCiphertext& ct) {
  if (!ct.quantum_part.consumed())
    throw std::logic_error(
        "serialize_ciphertext: live quantum part cannot be serialized");
  ByteWriter w;
  w.block(ct.classical_part);
  return w.take();
}

Bytes serialize_ciphertext_test_mode(const PvdCiphertext& ct) {
  const TwoBranchState& s = ct.quantum_part.peek_for_tests();
  ByteWriter w;
  w.block(ct.classical_part);
  w.u32(static_cast<std::uint32_t>(s.n()));
  w.bits(s.x0());
  w.bits(s.x1());
  w.u8(static_cast<std::uint8_t>(s.phase()));
  return w.take();
}

PvdCiphertext parse_ciphertext_test_mode(const Bytes& b) {
  ByteReader r(b);
  Bytes classical = r.block();
  const std::uint32_t n = r.u32();
  BitString x0 = r.bits(), x1 = r.bits();
  const int phase = r.u8();
  r.expect_done();
  if (x0.size() != n || x1.size() != n)
    throw std::runtime_error("parse_ciphertext: inconsistent register size");
  return PvdCiphertext{std::move(classical),
                       QuantumPart(TwoBranchState(std::move(x0), std::move(x1),
                                                  phase))};
}

}  // namespace pvd
