#include "saslab/metrics.hpp"

#include "saslab/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <thread>

namespace saslab {

InputDomain slice_domain(const LockedCircuit &locked)
{
	return InputDomain{locked.input_slice()};
}

InputDomain full_input_domain(const Circuit &locked)
{
	auto keys = key_input_names(locked);
	std::set<std::string> key_set(keys.begin(), keys.end());
	InputDomain d;
	for (const auto &in : locked.inputs())
		if (!key_set.contains(in))
			d.inputs.push_back(in);
	return d;
}

BitVector KeyDomain::key(std::uint64_t index) const
{
	BitVector k = base;
	const std::size_t nb = bits.size();
	for (std::size_t q = 0; q < nb; ++q)
		k.set(bits[q], (index >> (nb - 1 - q)) & 1u);
	return k;
}

KeyDomain full_key_domain(std::size_t key_bits)
{
	KeyDomain d{BitVector(key_bits), {}};
	for (std::size_t i = 0; i < key_bits; ++i)
		d.bits.push_back(i);
	return d;
}

KeyDomain block_key_domain(const LockedCircuit &locked, std::size_t j)
{
	const SasSpec &spec = locked.sas();
	if (j >= spec.l)
		throw SpecError("block index out of range");
	KeyDomain d{locked.correct_key, {}};
	for (std::size_t i = 2 * spec.n * j; i < 2 * spec.n * (j + 1); ++i)
		d.bits.push_back(i);
	return d;
}

double to_double(const Rational &r)
{
	return static_cast<double>(r);
}

// ---------------------------------------------------------------------------
// Sweep engine: evaluates the locked circuit against the original on
// (key, minterm) pairs packed 64 per word.

namespace {

struct Role {
	enum Kind : std::uint8_t { Fixed, Vary, KeyConst, KeyVary } kind = Fixed;
	std::size_t index = 0; // domain position or key-domain position
	bool value = false;    // KeyConst bit
};

class PairSweeper {
public:
	PairSweeper(const Circuit &locked, const Circuit &original, const InputDomain &inputs, const KeyDomain &keys)
	    : locked_(locked), original_(original), keys_(keys), width_(inputs.width())
	{
		if (locked.outputs().size() != original.outputs().size())
			throw SpecError("locked and original circuits have different output counts");
		auto key_names = key_input_names(locked);
		if (keys.base.size() != key_names.size())
			throw SpecError("key domain has " + std::to_string(keys.base.size()) + " bits, circuit has " +
				std::to_string(key_names.size()) + " key inputs");
		std::map<std::string, std::size_t> vary;
		for (std::size_t p = 0; p < inputs.inputs.size(); ++p)
			if (!vary.emplace(inputs.inputs[p], p).second)
				throw SpecError("input domain lists '" + inputs.inputs[p] + "' twice");
		std::map<std::size_t, std::size_t> key_pos;
		for (std::size_t q = 0; q < keys.bits.size(); ++q)
			key_pos[keys.bits[q]] = q;
		std::map<std::string, std::size_t> key_index;
		for (std::size_t i = 0; i < key_names.size(); ++i)
			key_index[key_names[i]] = i;

		std::set<std::string> locked_plain;
		for (const auto &in : locked.inputs()) {
			Role r;
			if (auto k = key_index.find(in); k != key_index.end()) {
				if (auto q = key_pos.find(k->second); q != key_pos.end())
					r = Role{Role::KeyVary, q->second, false};
				else
					r = Role{Role::KeyConst, 0, keys.base[k->second]};
			} else {
				locked_plain.insert(in);
				if (auto v = vary.find(in); v != vary.end())
					r = Role{Role::Vary, v->second, false};
			}
			locked_roles_.push_back(r);
		}
		for (const auto &[name, p] : vary)
			if (!locked_plain.contains(name))
				throw SpecError("input domain names '" + name + "', which is not a non-key input");
		for (const auto &in : original.inputs()) {
			if (!locked_plain.contains(in))
				throw SpecError("original input '" + in + "' is missing from the locked circuit");
			Role r;
			if (auto v = vary.find(in); v != vary.end())
				r = Role{Role::Vary, v->second, false};
			original_roles_.push_back(r);
		}
	}

	/// Counts corruptions for key indices [k0, k1) over the minterm list
	/// (empty list = all 2^width minterms).
	void run(std::uint64_t k0, std::uint64_t k1, const std::vector<Minterm> &list, std::uint32_t *per_key,
		std::vector<std::uint64_t> &per_input) const
	{
		const std::uint64_t ni = list.empty() ? (std::uint64_t{1} << width_) : list.size();
		PackedSimulator lsim(locked_), osim(original_);
		std::vector<std::uint64_t> lin(locked_.inputs().size()), oin(original_.inputs().size());
		std::vector<std::uint64_t> lout(locked_.outputs().size()), oout(original_.outputs().size());
		std::uint64_t lane_key[64];
		Minterm lane_x[64];
		std::uint64_t lane_pos[64];
		const std::uint64_t total_end = k1 * ni;
		const std::size_t nb = keys_.bits.size();
		for (std::uint64_t t = k0 * ni; t < total_end; t += 64) {
			const unsigned lanes = static_cast<unsigned>(std::min<std::uint64_t>(64, total_end - t));
			for (unsigned lane = 0; lane < lanes; ++lane) {
				lane_key[lane] = (t + lane) / ni;
				lane_pos[lane] = (t + lane) % ni;
				lane_x[lane] = list.empty() ? lane_pos[lane] : list[lane_pos[lane]];
			}
			auto fill = [&](const std::vector<Role> &roles, std::vector<std::uint64_t> &words) {
				for (std::size_t i = 0; i < roles.size(); ++i) {
					const Role &r = roles[i];
					std::uint64_t w = 0;
					switch (r.kind) {
					case Role::Fixed:
						break;
					case Role::KeyConst:
						w = r.value ? ~std::uint64_t{0} : 0;
						break;
					case Role::Vary:
						for (unsigned lane = 0; lane < lanes; ++lane)
							w |= ((lane_x[lane] >> (width_ - 1 - r.index)) & 1u) << lane;
						break;
					case Role::KeyVary:
						for (unsigned lane = 0; lane < lanes; ++lane)
							w |= ((lane_key[lane] >> (nb - 1 - r.index)) & 1u) << lane;
						break;
					}
					words[i] = w;
				}
			};
			fill(locked_roles_, lin);
			fill(original_roles_, oin);
			lsim.run(lin, lout);
			osim.run(oin, oout);
			std::uint64_t diff = 0;
			for (std::size_t o = 0; o < lout.size(); ++o)
				diff |= lout[o] ^ oout[o];
			if (lanes < 64)
				diff &= (std::uint64_t{1} << lanes) - 1;
			while (diff) {
				unsigned lane = static_cast<unsigned>(std::countr_zero(diff));
				diff &= diff - 1;
				++per_key[lane_key[lane] - k0];
				++per_input[lane_pos[lane]];
			}
		}
	}

	unsigned width() const { return width_; }

private:
	const Circuit &locked_;
	const Circuit &original_;
	const KeyDomain &keys_;
	unsigned width_;
	std::vector<Role> locked_roles_, original_roles_;
};

void check_limits(const InputDomain &inputs, const KeyDomain &keys)
{
	if (inputs.width() > kMaxExhaustiveInputBits)
		throw LimitError("input domain of " + std::to_string(inputs.width()) + " bits exceeds the exhaustive limit of " +
			std::to_string(kMaxExhaustiveInputBits));
	if (keys.bits.size() > kMaxExhaustiveKeyBits)
		throw LimitError("key domain of " + std::to_string(keys.bits.size()) + " bits exceeds the exhaustive limit of " +
			std::to_string(kMaxExhaustiveKeyBits) + "; use sampling");
}

/// Runs the sweep with key ranges split across threads; counts are merged in
/// a fixed order, so results do not depend on the thread count.
void parallel_sweep(const PairSweeper &sweeper, std::uint64_t key_count, const std::vector<Minterm> &list,
	unsigned threads, std::vector<std::uint32_t> &per_key, std::vector<std::uint64_t> &per_input)
{
	const std::size_t ni = list.empty() ? (std::size_t{1} << sweeper.width()) : list.size();
	per_key.assign(key_count, 0);
	per_input.assign(ni, 0);
	threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(key_count, 256))));
	if (threads == 1) {
		sweeper.run(0, key_count, list, per_key.data(), per_input);
		return;
	}
	std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(ni, 0));
	std::vector<std::thread> pool;
	for (unsigned i = 0; i < threads; ++i) {
		std::uint64_t k0 = key_count * i / threads, k1 = key_count * (i + 1) / threads;
		pool.emplace_back([&, i, k0, k1] { sweeper.run(k0, k1, list, per_key.data() + k0, partial[i]); });
	}
	for (auto &t : pool)
		t.join();
	for (const auto &p : partial)
		for (std::size_t x = 0; x < ni; ++x)
			per_input[x] += p[x];
}

} // namespace

// ---------------------------------------------------------------------------
// Exhaustive profiles

Rational ErrorProfile::ker(std::uint64_t key_index) const
{
	return Rational(key_corruptions.at(key_index)) / Rational(minterm_count());
}

Rational ErrorProfile::ier(Minterm x) const
{
	if (wrong_keys == 0)
		throw SpecError("no wrong keys in the key domain");
	return Rational(minterm_corruptions.at(x)) / Rational(wrong_keys);
}

Rational ErrorProfile::e_w() const
{
	if (wrong_keys == 0)
		throw SpecError("no wrong keys in the key domain");
	Rational sum = 0;
	for (std::uint64_t k = 0; k < key_corruptions.size(); ++k)
		if (key_corruptions[k] > 0)
			sum += ker(k);
	return sum / Rational(wrong_keys);
}

Rational ErrorProfile::gamma() const
{
	Rational sum = 0;
	for (Minterm x = 0; x < minterm_corruptions.size(); ++x)
		sum += ier(x);
	return sum / Rational(minterm_count());
}

ErrorProfile error_profile(const Circuit &locked, const Circuit &original, const InputDomain &inputs,
	const KeyDomain &keys, SweepOptions options)
{
	check_limits(inputs, keys);
	PairSweeper sweeper(locked, original, inputs, keys);
	ErrorProfile p;
	p.input_names = inputs.inputs;
	p.keys = keys;
	parallel_sweep(sweeper, keys.size(), {}, options.threads, p.key_corruptions, p.minterm_corruptions);
	p.wrong_keys = static_cast<std::uint64_t>(
		std::count_if(p.key_corruptions.begin(), p.key_corruptions.end(), [](std::uint32_t c) { return c > 0; }));
	return p;
}

std::vector<Minterm> corrupted_set(const Circuit &locked, const Circuit &original, const BitVector &key,
	const InputDomain &inputs)
{
	KeyDomain single{key, {}};
	check_limits(inputs, single);
	PairSweeper sweeper(locked, original, inputs, single);
	std::vector<std::uint32_t> per_key;
	std::vector<std::uint64_t> per_input;
	parallel_sweep(sweeper, 1, {}, 1, per_key, per_input);
	std::vector<Minterm> out;
	for (Minterm x = 0; x < per_input.size(); ++x)
		if (per_input[x])
			out.push_back(x);
	return out;
}

Rational ker(const Circuit &locked, const Circuit &original, const BitVector &key, const InputDomain &inputs)
{
	auto set = corrupted_set(locked, original, key, inputs);
	return Rational(set.size()) / Rational(std::uint64_t{1} << inputs.width());
}

Rational ier(const Circuit &locked, const Circuit &original, Minterm x, const InputDomain &inputs,
	const KeyDomain &keys, SweepOptions options)
{
	check_limits(inputs, keys);
	if (x >> inputs.width())
		throw SpecError("minterm exceeds the input domain width");
	PairSweeper sweeper(locked, original, inputs, keys);
	// Wrong keys need the full row; the corrupting count needs only column x.
	std::vector<std::uint32_t> per_key;
	std::vector<std::uint64_t> per_input;
	parallel_sweep(sweeper, keys.size(), {}, options.threads, per_key, per_input);
	std::uint64_t wrong = static_cast<std::uint64_t>(
		std::count_if(per_key.begin(), per_key.end(), [](std::uint32_t c) { return c > 0; }));
	if (wrong == 0)
		throw SpecError("no wrong keys in the key domain");
	return Rational(per_input[x]) / Rational(wrong);
}

AverageIdentity average_identity(const ErrorProfile &profile)
{
	AverageIdentity r;
	r.e_w = profile.e_w();
	r.gamma = profile.gamma();
	r.equal = r.e_w == r.gamma;
	return r;
}

// ---------------------------------------------------------------------------
// Sampled estimates

Estimate wilson_estimate(std::uint64_t hits, std::uint64_t trials)
{
	Estimate e;
	e.hits = hits;
	e.trials = trials;
	if (trials == 0)
		return e;
	const double z = 1.959963984540054;
	const double n = static_cast<double>(trials);
	const double p = static_cast<double>(hits) / n;
	const double denom = 1 + z * z / n;
	const double centre = (p + z * z / (2 * n)) / denom;
	const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
	e.value = p;
	e.lo = std::max(0.0, centre - half);
	e.hi = std::min(1.0, centre + half);
	return e;
}

Estimate ker_sampled(const Circuit &locked, const Circuit &original, const BitVector &key, const InputDomain &inputs,
	std::uint64_t samples, std::uint64_t seed)
{
	if (inputs.width() > 63)
		throw LimitError("input domain wider than 63 bits");
	KeyDomain single{key, {}};
	PairSweeper sweeper(locked, original, inputs, single);
	Rng rng(seed);
	std::vector<Minterm> list(samples);
	for (auto &x : list)
		x = rng.next() & minterm_mask(inputs.width());
	std::vector<std::uint32_t> per_key(1, 0);
	std::vector<std::uint64_t> per_input(samples, 0);
	if (samples > 0)
		sweeper.run(0, 1, list, per_key.data(), per_input);
	std::uint64_t hits = static_cast<std::uint64_t>(std::count_if(per_input.begin(), per_input.end(),
		[](std::uint64_t c) { return c > 0; }));
	return wilson_estimate(hits, samples);
}

Estimate ier_sampled(const Circuit &locked, const Circuit &original, Minterm x, const InputDomain &inputs,
	const KeyDomain &keys, const std::function<bool(const BitVector &)> &is_correct, std::uint64_t samples,
	std::uint64_t seed)
{
	Rng rng(seed);
	std::uint64_t hits = 0;
	const std::size_t nb = keys.bits.size();
	if (nb == 0)
		throw SpecError("key domain is a single key");
	std::vector<Minterm> list{x};
	std::vector<std::uint64_t> per_input(1);
	std::uint32_t per_key = 0;
	for (std::uint64_t s = 0; s < samples; ++s) {
		BitVector key;
		for (int attempt = 0;; ++attempt) {
			if (attempt == 1000)
				throw SpecError("key domain appears to contain only correct keys");
			BitVector candidate = keys.base;
			for (std::size_t q = 0; q < nb; ++q)
				candidate.set(keys.bits[q], rng.coin());
			if (!is_correct(candidate)) {
				key = std::move(candidate);
				break;
			}
		}
		KeyDomain single{key, {}};
		PairSweeper sweeper(locked, original, inputs, single);
		per_input[0] = 0;
		per_key = 0;
		sweeper.run(0, 1, list, &per_key, per_input);
		hits += per_input[0] > 0;
	}
	return wilson_estimate(hits, samples);
}

// ---------------------------------------------------------------------------
// Closed forms

Rational expected_iterations(unsigned n, unsigned m, unsigned l)
{
	if (l == 0)
		throw SpecError("l must be at least 1");
	Rational space = Rational(boost::multiprecision::cpp_int(1) << n);
	return (Rational(l) * space + Rational(m)) / Rational(l + 1);
}

Rational expected_iterations(const SasSpec &spec)
{
	return expected_iterations(spec.n, spec.m, spec.l);
}

Rational sas_gamma(unsigned n, unsigned m, unsigned l)
{
	Rational space = Rational(boost::multiprecision::cpp_int(1) << n);
	Rational critical = m == 0 ? Rational(0) : Rational(m) * Rational(l, m);
	return (critical + (space - Rational(m)) / space) / space;
}

double sfll_sat_success_prob(std::uint64_t q, std::uint64_t c, unsigned k)
{
	if (c == 0)
		throw SpecError("c must be at least 1");
	int log_c = c <= 1 ? 0 : static_cast<int>(std::bit_width(c - 1));
	double p = static_cast<double>(q) * std::ldexp(1.0, log_c - static_cast<int>(k));
	return std::min(1.0, p);
}

bool tradeoff_check(double gamma, double observed_mean)
{
	if (!(gamma > 0))
		throw SpecError("gamma must be positive");
	return observed_mean >= 1.0 / gamma;
}

bool tradeoff_check(const Rational &gamma, double observed_mean)
{
	if (gamma <= 0)
		throw SpecError("gamma must be positive");
	// Exact comparison: mean >= 1/gamma  <=>  mean * gamma >= 1.
	return Rational(observed_mean) * gamma >= 1;
}

SfllRates sfll_rates(const LockedCircuit &locked, const Circuit &original, const BitVector &key)
{
	const SfllSpec &spec = locked.sfll();
	auto set = corrupted_set(locked.circuit, original, key, slice_domain(locked));
	std::uint64_t stripped = static_cast<std::uint64_t>(
		std::count_if(set.begin(), set.end(), [&](Minterm x) { return spec.protects(x); }));
	Rational space = Rational(boost::multiprecision::cpp_int(1) << spec.n);
	return SfllRates{Rational(set.size()) / space, Rational(stripped) / space};
}

} // namespace saslab
