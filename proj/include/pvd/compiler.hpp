#pragma once

#include <optional>
#include <utility>

#include "pvd/primitives.hpp"

namespace pvd {

// Consume-once holder for the quantum half of a ciphertext. Decryption and
// deletion both measure the state destructively, so whichever runs first
// takes ownership and the other throws. This is the API-level stand-in for
// the no-cloning restriction.
class QuantumPart {
 public:
  explicit QuantumPart(TwoBranchState s) : s_(std::move(s)) {}

  bool consumed() const { return !s_.has_value(); }

  TwoBranchState take() {
    if (!s_) throw std::logic_error("quantum part already consumed");
    TwoBranchState out = std::move(*s_);
    s_.reset();
    return out;
  }

  // Test-only introspection; the state stays in place.
  const TwoBranchState& peek_for_tests() const {
    if (!s_) throw std::logic_error("quantum part already consumed");
    return *s_;
  }

 private:
  std::optional<TwoBranchState> s_;
};

struct PvdKeyPair {
  Bytes pk, sk;
};

// t pure-state copies per branch key; every Ver sub-check spends one copy
// from the side it tests, accepted or not.
struct QuantumVk {
  std::vector<DenseState> copies0, copies1;
};

struct PvdVerificationKey {
  std::optional<std::pair<BitString, BitString>> classical;  // (y0, y1)
  std::optional<QuantumVk> quantum;
};

struct PvdCiphertext {
  Bytes classical_part;
  QuantumPart quantum_part;
};

struct DeletionCertificate {
  BitString pi;
};

// Uniform pair with x0 != x1: the second draw is repeated until it differs
// from the first.
std::pair<BitString, BitString> sample_branch_pair(std::size_t n, SplitRng& rng);

// Key generation is that of the underlying PKE, unchanged.
PvdKeyPair pv_gen(const Pke& pke, SplitRng& rng);

// Encrypt one bit b: draw x0 != x1, publish vk = (F(x0), F(x1)), encrypt
// z = x0 ^ x1 under the PKE, and attach (|x0> + (-1)^b |x1>)/sqrt(2).
std::pair<PvdVerificationKey, PvdCiphertext> pv_enc(const Pke& pke,
                                                    const Bytes& pk,
                                                    const Owf& f, int b,
                                                    SplitRng& rng);

// Same classical behavior on the same stream; vk carries t copies of
// phi_{x0} and phi_{x1} instead of images.
std::pair<PvdVerificationKey, PvdCiphertext> pv_enc_owsg(const Pke& pke,
                                                         const Bytes& pk,
                                                         const Owsg& g, int b,
                                                         int t, SplitRng& rng);

// Decrypt: recover z, measure the quantum part in the Hadamard basis,
// output z . w. Consumes the quantum part; shared by both scheme variants.
int pv_dec(const Pke& pke, const Bytes& sk, PvdCiphertext& ct, SplitRng& rng);

// Delete: measure computationally; the outcome is the certificate.
// Consumes the quantum part; shared by both scheme variants.
DeletionCertificate pv_del(PvdCiphertext& ct, SplitRng& rng);

// Accept iff F(pi) is one of the published images.
bool pv_vrfy(const Owf& f, const PvdVerificationKey& vk,
             const DeletionCertificate& cert);

// Projective test against side 0, then side 1 on reject. Each sub-check
// spends one stored copy; throws std::runtime_error when a needed side has
// no copies left.
bool pv_vrfy_owsg(const Owsg& g, PvdVerificationKey& vk,
                  const DeletionCertificate& cert, SplitRng& rng);

// Generic form of pv_enc: identical draws, arbitrary presentation of z.
// With a pke wrapper this reproduces pv_enc bit for bit.
std::pair<PvdVerificationKey, WrappedInstance> compile(const SemanticWrapper& sw,
                                                       const Owf& f, int b,
                                                       SplitRng& rng);
std::pair<PvdVerificationKey, WrappedInstance> compile_owsg(
    const SemanticWrapper& sw, const Owsg& g, int b, int t, SplitRng& rng);

// --- serialization -------------------------------------------------------------
//
// Classical values use the length-prefixed layout of bytes.hpp. A ciphertext
// whose quantum part is still live cannot be serialized (production mode
// refuses); the test-mode form writes the hidden description (n, x0, x1, b)
// and exists for fixtures only.

Bytes serialize_keypair(const PvdKeyPair& kp);
PvdKeyPair parse_keypair(const Bytes& b);

Bytes serialize_vk(const PvdVerificationKey& vk);  // classical variant only
PvdVerificationKey parse_vk(const Bytes& b);

Bytes serialize_certificate(const DeletionCertificate& cert);
DeletionCertificate parse_certificate(const Bytes& b);

Bytes serialize_ciphertext(const PvdCiphertext& ct);  // throws if quantum live
Bytes serialize_ciphertext_test_mode(const PvdCiphertext& ct);
PvdCiphertext parse_ciphertext_test_mode(const Bytes& b);

}  // namespace pvd
