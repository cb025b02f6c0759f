#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

#include "pvd/bitstring.hpp"
#include "pvd/bytes.hpp"
#include "pvd/dense.hpp"
#include "pvd/qstate.hpp"
#include "pvd/rng.hpp"

namespace pvd {

Bytes sha256(const Bytes& data);

// Counter-mode SHA-256 expansion of (domain, context) to nbits bits.
BitString kdf_bits(const std::string& domain, const Bytes& context,
                   std::size_t nbits);

// --- one-way functions -------------------------------------------------------

// F : {0,1}^n -> {0,1}^m. Implementations are deterministic; the toy family
// additionally exposes exhaustive preimage lookup so experiments can run an
// unbounded inverter.
class Owf {
 public:
  virtual ~Owf() = default;

  std::size_t input_bits() const { return n_; }
  std::size_t output_bits() const { return m_; }
  virtual std::string name() const = 0;

  virtual BitString eval(const BitString& x) const = 0;

  virtual bool enumerable() const { return false; }

  // All preimages of y in ascending order; throws std::logic_error unless
  // enumerable().
  virtual std::vector<BitString> preimages(const BitString& y) const;

 protected:
  Owf(std::size_t n, std::size_t m);

 private:
  std::size_t n_, m_;
};

using OwfPtr = std::shared_ptr<const Owf>;

// SHA-256 based, domain-separated by (n, m). Not enumerable.
OwfPtr owf_hash(std::size_t n, std::size_t m);

// Seeded lookup table over all 2^n inputs (n <= 16), preimages available.
OwfPtr owf_toy(std::size_t n, std::size_t m, std::uint64_t seed);

// --- classical public-key encryption ----------------------------------------

struct PkeKeyPair {
  Bytes pk, sk;
};

// Bit-string PKE with byte-serialized keys and ciphertexts. Every ciphertext
// starts with a one-byte format tag, so outputs of different schemes are
// distinguishable by inspection.
class Pke {
 public:
  virtual ~Pke() = default;
  virtual std::string name() const = 0;
  virtual PkeKeyPair keygen(SplitRng& rng) const = 0;
  virtual Bytes enc(const Bytes& pk, const BitString& msg, SplitRng& rng) const = 0;
  virtual BitString dec(const Bytes& sk, const Bytes& ct) const = 0;
};

using PkePtr = std::shared_ptr<const Pke>;

inline constexpr std::uint8_t kCtTagGroup = 1;
inline constexpr std::uint8_t kCtTagClear = 2;

// Safe-prime group p = 2q + 1 with g generating the order-q subgroup.
struct GroupParams {
  mpz_class p, q, g;
  std::string label;

  // "tiny64" and "small256" are fast test groups; "modp2048" is a standard
  // 2048-bit modular exponentiation group of cryptographic size.
  static GroupParams preset(const std::string& name);

  // Checks the group structure. Primality is probabilistic (Miller-Rabin).
  void validate() const;
};

// Hashed ElGamal over the given group: mask = KDF(c1, pk^r), c2 = msg ^ mask.
PkePtr pke_group(const GroupParams& params);

// Identity "encryption" for hybrid plumbing: the ciphertext is the message
// with a format tag. Provides no hiding whatsoever.
PkePtr pke_transparent();

// --- commitment ---------------------------------------------------------------

// Hash commitment: digest = SHA-256(domain || r || value), opening = r.
// Hiding is statistical in the 32-byte r; binding is computational only,
// resting on collision resistance of the hash.
struct Commitment {
  Bytes digest, opening;
};

Commitment commit(const BitString& value, SplitRng& rng);
bool commit_verify(const Bytes& digest, const BitString& value,
                   const Bytes& opening);

// --- semantic wrapper ----------------------------------------------------------

// How the classical value z is presented to the adversary. The quantum part
// passes through wrap() untouched in all cases.
enum class WrapperKind { transparent, pke, commitment };

struct SemanticWrapper {
  WrapperKind kind = WrapperKind::pke;
  const Pke* pke = nullptr;  // pke kind only; not owned, must outlive the wrapper
  Bytes pk;                  // pke kind only

  static SemanticWrapper transparent();
  static SemanticWrapper with_pke(const Pke& pke, Bytes pk);
  static SemanticWrapper committing();
};

struct WrappedInstance {
  Bytes payload;         // adversary-visible form of z
  Bytes payload_key;     // pke kind: the public key, also adversary-visible
  Bytes secret_opening;  // commitment kind: challenger-side, never shown
  Bytes aux0, aux1;      // forwarded in the clear
  TwoBranchState quantum;
};

WrappedInstance wrap(const SemanticWrapper& sw, const BitString& z,
                     const Bytes& aux0, const Bytes& aux1,
                     TwoBranchState quantum, SplitRng& rng);

// --- one-way state generators ---------------------------------------------------

// k -> pure state phi_k on a small register. Ver(k', phi) applies the
// projective test {|phi_k'><phi_k'|, rest} to one copy and reports the result;
// the tested copy is spent either way.
class Owsg {
 public:
  virtual ~Owsg() = default;

  std::size_t key_bits() const { return n_; }
  int state_qubits() const { return m_; }
  virtual std::string name() const = 0;

  BitString keygen(SplitRng& rng) const { return rng.bits(n_); }
  virtual DenseState stategen(const BitString& k) const = 0;

  // |<phi_k' | phi>|^2
  double accept_probability(const BitString& k_prime, const DenseState& phi) const;
  bool ver(const BitString& k_prime, const DenseState& phi, SplitRng& rng) const;

 protected:
  Owsg(std::size_t n, int m);

 private:
  std::size_t n_;
  int m_;
};

using OwsgPtr = std::shared_ptr<const Owsg>;

// The last key bit picks one of two orthogonal basis states; the remaining
// bits seed a scrambling circuit. Keys differing only in the last bit
// therefore map to exactly orthogonal states, which the deletion experiments
// rely on for unambiguous verification.
OwsgPtr owsg_toy(std::size_t n, int m, std::uint64_t seed);

// k with the last bit flipped.
BitString sibling_key(const BitString& k);

}  // namespace pvd
