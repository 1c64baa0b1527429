#pragma once

#include "saslab/bits.hpp"
#include "saslab/locking.hpp"
#include "saslab/netlist.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace saslab {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr unsigned kMaxExhaustiveInputBits = 20;
inline constexpr unsigned kMaxExhaustiveKeyBits = 24;

/// Inputs enumerated by a metric, MSB-first; every other non-key input is held at 0.
struct InputDomain {
	std::vector<std::string> inputs;
	unsigned width() const { return static_cast<unsigned>(inputs.size()); }
};

/// The locking slice of a locked circuit.
InputDomain slice_domain(const LockedCircuit &locked);
/// Every non-key primary input of `locked`.
InputDomain full_input_domain(const Circuit &locked);

/// Keys enumerated by a metric: the listed key bits vary (first listed bit is
/// the MSB of the domain index), the rest stay at `base`.
struct KeyDomain {
	BitVector base;
	std::vector<std::size_t> bits;

	std::uint64_t size() const { return std::uint64_t{1} << bits.size(); }
	BitVector key(std::uint64_t index) const;
};

KeyDomain full_key_domain(std::size_t key_bits);
/// Block j's K1/K2 bits vary; every other block keeps the correct key.
KeyDomain block_key_domain(const LockedCircuit &locked, std::size_t j);

struct SweepOptions {
	unsigned threads = 1;
};

/**
 * Exhaustive corruption counts over a key domain and an input domain.
 * A key is wrong when it corrupts at least one enumerated minterm.
 */
struct ErrorProfile {
	std::vector<std::string> input_names;
	KeyDomain keys;
	/// |X_K| per key-domain index.
	std::vector<std::uint32_t> key_corruptions;
	/// |K_X| per minterm.
	std::vector<std::uint64_t> minterm_corruptions;
	std::uint64_t wrong_keys = 0;

	unsigned input_width() const { return static_cast<unsigned>(input_names.size()); }
	std::uint64_t minterm_count() const { return std::uint64_t{1} << input_width(); }
	Rational ker(std::uint64_t key_index) const;
	/// Throws SpecError when there are no wrong keys.
	Rational ier(Minterm x) const;
	/// Mean KER over wrong keys.
	Rational e_w() const;
	/// Mean IER over minterms.
	Rational gamma() const;
};

ErrorProfile error_profile(const Circuit &locked, const Circuit &original, const InputDomain &inputs,
	const KeyDomain &keys, SweepOptions options = {});

/// The minterms of the input domain on which `key` corrupts the outputs.
std::vector<Minterm> corrupted_set(const Circuit &locked, const Circuit &original, const BitVector &key,
	const InputDomain &inputs);
Rational ker(const Circuit &locked, const Circuit &original, const BitVector &key, const InputDomain &inputs);
/// Exact IER of one minterm over a key domain.
Rational ier(const Circuit &locked, const Circuit &original, Minterm x, const InputDomain &inputs,
	const KeyDomain &keys, SweepOptions options = {});

/// Binomial estimate with a 95% Wilson score interval.
struct Estimate {
	std::uint64_t hits = 0;
	std::uint64_t trials = 0;
	double value = 0;
	double lo = 0;
	double hi = 1;
};

Estimate wilson_estimate(std::uint64_t hits, std::uint64_t trials);

Estimate ker_sampled(const Circuit &locked, const Circuit &original, const BitVector &key, const InputDomain &inputs,
	std::uint64_t samples, std::uint64_t seed);
/// Keys are drawn uniformly from `keys`; draws accepted by `is_correct` are redrawn.
Estimate ier_sampled(const Circuit &locked, const Circuit &original, Minterm x, const InputDomain &inputs,
	const KeyDomain &keys, const std::function<bool(const BitVector &)> &is_correct, std::uint64_t samples,
	std::uint64_t seed);

struct AverageIdentity {
	Rational e_w;
	Rational gamma;
	bool equal = false;
};

/// e_w and gamma summed independently (per key, per minterm) from one sweep.
AverageIdentity average_identity(const ErrorProfile &profile);

/// (l * 2^n + m) / (l + 1); equals (2^n + m) / 2 for l = 1.
Rational expected_iterations(unsigned n, unsigned m, unsigned l);
Rational expected_iterations(const SasSpec &spec);
/// Closed-form gamma of a SAS instance: (m * (l/m) + (2^n - m) * 2^-n) / 2^n.
Rational sas_gamma(unsigned n, unsigned m, unsigned l);

/// min(1, q * 2^(ceil(log2 c) - k)).
double sfll_sat_success_prob(std::uint64_t q, std::uint64_t c, unsigned k);

/// Error/resilience trade-off: observed mean >= 1 / gamma. Throws SpecError for gamma <= 0.
bool tradeoff_check(double gamma, double observed_mean);
bool tradeoff_check(const Rational &gamma, double observed_mean);

/// SFLL-flex error rates of one key over the slice.
struct SfllRates {
	/// |X_K| / 2^n: protected cubes not restored plus wrongly restored cubes.
	Rational corrupted;
	/// Corrupted minterms inside the protected cubes only, / 2^n.
	Rational stripped_only;
};

SfllRates sfll_rates(const LockedCircuit &locked, const Circuit &original, const BitVector &key);

double to_double(const Rational &r);

} // namespace saslab
