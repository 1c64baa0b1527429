#include "saslab/attacks.hpp"

#include "saslab/cnf.hpp"
#include "saslab/errors.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <thread>

namespace saslab {

Oracle::Oracle(Circuit circuit) : circuit_(std::move(circuit))
{
	if (!key_input_names(circuit_).empty())
		throw SpecError("an oracle circuit must not have key inputs");
}

BitVector Oracle::query(const Assignment &inputs) const
{
	BitVector bits(circuit_.inputs().size());
	for (std::size_t i = 0; i < circuit_.inputs().size(); ++i) {
		auto it = inputs.find(circuit_.inputs()[i]);
		if (it == inputs.end())
			throw SpecError("oracle query misses input '" + circuit_.inputs()[i] + "'");
		bits.set(i, it->second);
	}
	++queries_;
	return evaluate(circuit_, bits);
}

std::string_view to_string(Termination t)
{
	switch (t) {
	case Termination::Exhausted:
		return "exhausted";
	case Termination::IterationLimit:
		return "iteration-limit";
	case Termination::TimeLimit:
		return "time-limit";
	}
	return "?";
}

std::string_view to_string(Branching b)
{
	return b == Branching::Vsids ? "vsids" : "inputs-first";
}

std::optional<Branching> parse_branching(std::string_view text)
{
	for (Branching b : {Branching::Vsids, Branching::InputsFirst})
		if (text == to_string(b))
			return b;
	return std::nullopt;
}

// ---------------------------------------------------------------------------
// SAT attack

namespace {

/// Forwards clauses to the engine and optionally keeps a copy for DIMACS dumps.
class RecordingSink final : public ClauseSink {
public:
	RecordingSink(SatEngine &engine, CnfFormula *log) : engine_(engine), log_(log) {}

	int new_var() override
	{
		int v = engine_.new_var();
		if (log_)
			log_->num_vars = v;
		return v;
	}
	void add_clause(std::span<const int> literals) override
	{
		engine_.add_clause(literals);
		if (log_)
			log_->add_clause(literals);
	}
	using ClauseSink::add_clause;

private:
	SatEngine &engine_;
	CnfFormula *log_;
};

Signal xor_signal(ClauseSink &sink, const Signal &a, const Signal &b)
{
	if (a.is_constant())
		return a.value ? b.negated() : b;
	if (b.is_constant())
		return b.value ? a.negated() : a;
	if (a.lit == b.lit)
		return Signal::constant(false);
	if (a.lit == -b.lit)
		return Signal::constant(true);
	int v = sink.new_var();
	int ins[2] = {a.lit, b.lit};
	encode_gate(sink, GateKind::Xor, v, ins);
	return Signal::literal(v);
}

/// Packed re-simulation of the DI log under a candidate key.
class LogChecker {
public:
	LogChecker(const Circuit &locked, std::vector<int> plain_pos, std::vector<int> key_pos)
	    : locked_(locked), plain_pos_(std::move(plain_pos)), key_pos_(std::move(key_pos)), sim_(locked)
	{
	}

	void add(const BitVector &x, const BitVector &y)
	{
		if (count_ % 64 == 0) {
			inputs_.emplace_back(locked_.inputs().size(), 0);
			outputs_.emplace_back(y.size(), 0);
		}
		const std::size_t lane = count_ % 64;
		auto &in = inputs_.back();
		for (std::size_t i = 0; i < in.size(); ++i)
			if (plain_pos_[i] >= 0 && x[static_cast<std::size_t>(plain_pos_[i])])
				in[i] |= std::uint64_t{1} << lane;
		auto &out = outputs_.back();
		for (std::size_t o = 0; o < y.size(); ++o)
			if (y[o])
				out[o] |= std::uint64_t{1} << lane;
		++count_;
	}

	/// True when `key` reproduces every logged response.
	bool consistent(const BitVector &key)
	{
		std::vector<std::uint64_t> out(locked_.outputs().size());
		for (std::size_t b = 0; b < inputs_.size(); ++b) {
			auto in = inputs_[b];
			for (std::size_t i = 0; i < in.size(); ++i)
				if (key_pos_[i] >= 0)
					in[i] = key[static_cast<std::size_t>(key_pos_[i])] ? ~std::uint64_t{0} : 0;
			sim_.run(in, out);
			std::size_t lanes = std::min<std::size_t>(64, count_ - 64 * b);
			std::uint64_t mask = lanes == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << lanes) - 1;
			for (std::size_t o = 0; o < out.size(); ++o)
				if ((out[o] ^ outputs_[b][o]) & mask)
					return false;
		}
		return true;
	}

private:
	const Circuit &locked_;
	std::vector<int> plain_pos_, key_pos_;
	PackedSimulator sim_;
	std::size_t count_ = 0;
	std::vector<std::vector<std::uint64_t>> inputs_, outputs_;
};

} // namespace

AttackResult sat_attack(const Circuit &locked, const Oracle &oracle, const AttackOptions &options)
{
	const auto start = std::chrono::steady_clock::now();
	auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

	const auto key_names = key_input_names(locked);
	if (key_names.empty())
		throw SpecError("circuit has no key inputs");
	std::map<std::string, std::size_t> key_index;
	for (std::size_t i = 0; i < key_names.size(); ++i)
		key_index[key_names[i]] = i;

	AttackResult result;
	const std::size_t ni = locked.inputs().size();
	std::vector<int> plain_pos(ni, -1), key_pos(ni, -1);
	for (std::size_t i = 0; i < ni; ++i) {
		const auto &name = locked.inputs()[i];
		if (auto it = key_index.find(name); it != key_index.end()) {
			key_pos[i] = static_cast<int>(it->second);
		} else {
			plain_pos[i] = static_cast<int>(result.input_names.size());
			result.input_names.push_back(name);
		}
	}
	const std::set<std::string> plain(result.input_names.begin(), result.input_names.end());
	for (const auto &in : oracle.circuit().inputs())
		if (!plain.contains(in))
			throw SpecError("oracle input '" + in + "' is not an input of the locked circuit");
	if (oracle.circuit().outputs().size() != locked.outputs().size())
		throw SpecError("oracle and locked circuit have different output counts");

	SolverOptions solver_options{options.seed, true, -1};
	std::unique_ptr<SatEngine> engine;
	if (options.incremental)
		engine = std::make_unique<CdclSolver>(solver_options);
	else
		engine = std::make_unique<ReplaySolver>(solver_options);
	std::unique_ptr<CnfFormula> log;
	if (!options.dump_cnf_dir.empty()) {
		std::filesystem::create_directories(options.dump_cnf_dir);
		log = std::make_unique<CnfFormula>();
	}
	RecordingSink sink(*engine, log.get());

	const std::size_t np = result.input_names.size(), nk = key_names.size();
	std::vector<int> xv(np), ka(nk), kb(nk);
	for (auto &v : xv)
		v = sink.new_var();
	for (auto &v : ka)
		v = sink.new_var();
	for (auto &v : kb)
		v = sink.new_var();
	if (options.branching == Branching::InputsFirst)
		engine->set_decision_priority(xv);

	auto copy_signals = [&](const std::vector<int> &key_vars, const BitVector *x) {
		std::vector<Signal> sig(ni);
		for (std::size_t i = 0; i < ni; ++i) {
			if (key_pos[i] >= 0)
				sig[i] = Signal::literal(key_vars[static_cast<std::size_t>(key_pos[i])]);
			else if (x)
				sig[i] = Signal::constant((*x)[static_cast<std::size_t>(plain_pos[i])]);
			else
				sig[i] = Signal::literal(xv[static_cast<std::size_t>(plain_pos[i])]);
		}
		return sig;
	};

	// Miter of two free key copies, enabled by `act`.
	auto sig_a = copy_signals(ka, nullptr);
	auto sig_b = copy_signals(kb, nullptr);
	auto out_a = encode_folded(locked, sig_a, sink);
	auto out_b = encode_folded(locked, sig_b, sink);
	const int act = sink.new_var();
	std::vector<int> diff_clause{-act};
	bool trivially_different = false;
	for (std::size_t o = 0; o < out_a.size(); ++o) {
		Signal d = xor_signal(sink, out_a[o], out_b[o]);
		if (d.is_constant())
			trivially_different |= d.value;
		else
			diff_clause.push_back(d.lit);
	}
	if (!trivially_different)
		sink.add_clause(diff_clause);

	LogChecker checker(locked, plain_pos, key_pos);
	std::set<BitVector> seen;
	auto dump = [&](std::size_t iteration) {
		if (!log)
			return;
		std::ofstream os(std::filesystem::path(options.dump_cnf_dir) / ("iter_" + std::to_string(iteration) + ".cnf"));
		os << "c miter activation variable " << act << " (assumed true while searching for DIs)\n";
		write_dimacs(os, *log);
	};
	dump(0);

	auto read_key = [&](const std::vector<int> &vars) {
		BitVector k(nk);
		for (std::size_t i = 0; i < nk; ++i)
			k.set(i, engine->model_value(vars[i]));
		return k;
	};

	result.termination = Termination::Exhausted;
	while (true) {
		if (result.iterations >= options.iteration_limit) {
			result.termination = Termination::IterationLimit;
			break;
		}
		if (options.time_limit > 0 && elapsed() > options.time_limit) {
			result.termination = Termination::TimeLimit;
			break;
		}
		const int assume[1] = {act};
		SolveResult r = engine->solve(assume);
		if (r == SolveResult::Unknown)
			throw EngineError("satisfiability engine gave no verdict");
		if (r == SolveResult::Unsat)
			break;

		BitVector x(np);
		for (std::size_t i = 0; i < np; ++i)
			x.set(i, engine->model_value(xv[i]));
		if (!seen.insert(x).second)
			throw EngineError("distinguishing input repeated: " + x.to_string());
		Assignment query;
		for (std::size_t i = 0; i < np; ++i)
			query[result.input_names[i]] = x[i];
		BitVector y = oracle.query(query);

		if (options.check_invariants) {
			BitVector key_a = read_key(ka), key_b = read_key(kb);
			if (!checker.consistent(key_a) || !checker.consistent(key_b))
				throw EngineError("model key disagrees with a logged oracle response");
		}

		for (const auto *vars : {&ka, &kb}) {
			auto sig = copy_signals(*vars, &x);
			auto outs = encode_folded(locked, sig, sink);
			for (std::size_t o = 0; o < outs.size(); ++o)
				force_signal(sink, outs[o], y[o]);
		}
		checker.add(x, y);
		result.di_log.push_back(DiRecord{std::move(x), std::move(y)});
		++result.iterations;
		dump(result.iterations);
	}

	const int release[1] = {-act};
	SolveResult r = engine->solve(release);
	if (r == SolveResult::Unknown)
		throw EngineError("satisfiability engine gave no verdict");
	if (r == SolveResult::Unsat)
		throw EngineError("no key is consistent with the oracle responses");
	result.recovered_key = read_key(ka);
	result.wall_seconds = elapsed();
	result.oracle_queries = result.iterations;
	return result;
}

ApproximateResult approximate_sat_attack(const Circuit &locked, const Oracle &oracle, std::uint64_t settle_window,
	std::uint64_t sample_count, std::uint64_t seed, AttackOptions options)
{
	options.iteration_limit = settle_window;
	options.seed = seed;
	ApproximateResult r{sat_attack(locked, oracle, options), {}};
	r.error = ker_sampled(locked, oracle.circuit(), r.attack.recovered_key, full_input_domain(locked), sample_count,
		derive_seed(seed, 0xe77));
	return r;
}

// ---------------------------------------------------------------------------
// Removal attack

std::vector<RemovalCandidate> removal_candidates(const Circuit &locked)
{
	auto keys = key_input_names(locked);
	std::vector<Circuit::WireId> roots;
	for (const auto &k : keys)
		roots.push_back(*locked.find_wire(k));
	auto dep = locked.transitive_fanout(roots);
	auto fanouts = locked.fanouts();
	auto probs = signal_probabilities(locked);
	std::set<Circuit::WireId> outputs(locked.output_wires().begin(), locked.output_wires().end());

	std::vector<RemovalCandidate> out;
	for (Circuit::WireId w = 0; w < locked.wire_count(); ++w) {
		if (w == locked.zero_wire() || !dep[w] || outputs.contains(w) || fanouts[w].size() != 1)
			continue;
		std::size_t g = fanouts[w][0];
		if (locked.gates()[g].kind != GateKind::Xor)
			continue;
		auto fanin = locked.gate_fanin(g);
		if (fanin.size() != 2)
			continue;
		Circuit::WireId other = fanin[0] == w ? fanin[1] : fanin[0];
		if (other == w || dep[other])
			continue;
		const std::string &name = locked.wire_name(w);
		out.push_back(RemovalCandidate{name, probs.at(name) - 0.5});
	}
	std::sort(out.begin(), out.end(), [](const RemovalCandidate &a, const RemovalCandidate &b) {
		double sa = std::abs(a.skew), sb = std::abs(b.skew);
		if (sa != sb)
			return sa > sb;
		if (a.skew != b.skew)
			return a.skew < b.skew;
		return a.wire < b.wire;
	});
	return out;
}

RemovalResult removal_attack(const Circuit &locked, const std::optional<std::string> &target_wire)
{
	std::vector<std::string> targets;
	if (target_wire) {
		auto id = locked.find_wire(*target_wire);
		if (!id || *id == locked.zero_wire())
			throw NetlistError("unknown wire '" + *target_wire + "'");
		targets.push_back(*target_wire);
	} else {
		auto candidates = removal_candidates(locked);
		if (candidates.empty())
			throw SpecError("no locking output found for removal");
		// A skewed wire inside a block may feed further block logic before the
		// block joins the circuit (the RSAS inversion); follow it to the most
		// downstream candidate, which is the block's output.
		std::vector<Circuit::WireId> ids;
		for (const auto &c : candidates)
			ids.push_back(*locked.find_wire(c.wire));
		std::vector<std::vector<bool>> fanin;
		for (auto id : ids)
			fanin.push_back(locked.transitive_fanin(std::span(&id, 1)));
		// Seeds: candidates above the skew threshold, or the most skewed one.
		std::vector<bool> seed(ids.size(), false);
		for (std::size_t i = 0; i < ids.size(); ++i)
			seed[i] = std::abs(candidates[i].skew) > kRemovalSkewThreshold;
		if (std::none_of(seed.begin(), seed.end(), [](bool b) { return b; }))
			seed[0] = true;
		for (std::size_t i = 0; i < ids.size(); ++i) {
			bool downstream = true, skewed = seed[i];
			for (std::size_t j = 0; j < ids.size(); ++j) {
				if (i == j)
					continue;
				if (fanin[j][ids[i]])
					downstream = false;
				if (fanin[i][ids[j]] && seed[j])
					skewed = true;
			}
			if (downstream && skewed)
				targets.push_back(candidates[i].wire);
		}
	}
	Circuit c = locked;
	for (const auto &w : targets)
		c = tie_to_zero(c, w);
	c = propagate_constants(c);
	c = remove_dead_logic(c, [](const std::string &in) { return in.starts_with("keyinput"); });
	return RemovalResult{std::move(c), std::move(targets)};
}

// ---------------------------------------------------------------------------
// Model attack

IterationStats summarize_iterations(const std::vector<std::uint64_t> &counts)
{
	IterationStats s;
	s.trials = counts.size();
	if (counts.empty())
		return s;
	double sum = 0;
	s.min = counts[0];
	s.max = counts[0];
	for (auto c : counts) {
		sum += static_cast<double>(c);
		s.min = std::min(s.min, c);
		s.max = std::max(s.max, c);
		++s.histogram[c];
	}
	s.mean = sum / static_cast<double>(counts.size());
	double sq = 0;
	for (auto c : counts)
		sq += (static_cast<double>(c) - s.mean) * (static_cast<double>(c) - s.mean);
	s.variance = counts.size() > 1 ? sq / static_cast<double>(counts.size() - 1) : 0;
	s.std_error = std::sqrt(s.variance / static_cast<double>(counts.size()));
	return s;
}

namespace {

/// Runs `trial(t)` for every trial index, split across threads.
template <typename Fn>
std::vector<std::uint64_t> run_trials(std::uint64_t trials, unsigned threads, Fn trial)
{
	if (trials == 0)
		throw SpecError("trials must be at least 1");
	std::vector<std::uint64_t> counts(trials);
	threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(trials, 256))));
	std::vector<std::thread> pool;
	for (unsigned i = 0; i < threads; ++i) {
		std::uint64_t t0 = trials * i / threads, t1 = trials * (i + 1) / threads;
		pool.emplace_back([&, t0, t1] {
			for (std::uint64_t t = t0; t < t1; ++t)
				counts[t] = trial(t);
		});
	}
	for (auto &t : pool)
		t.join();
	return counts;
}

/// Coverage state of the SAS model. A wrong-key family is (block, K1 value)
/// with any K2 != K1; a critical minterm covers its whole K1 set at once.
class SasModel {
public:
	explicit SasModel(const SasSpec &spec) : spec_(spec), space_(std::size_t{1} << spec.n)
	{
		if (spec.n > kMaxPartitionWidth)
			throw LimitError("model attack limited to n <= " + std::to_string(kMaxPartitionWidth));
		crit_.assign(space_, -1);
		for (std::size_t j = 0; j < spec.l; ++j)
			for (std::size_t i = 0; i < spec.blocks[j].size(); ++i)
				crit_[spec.blocks[j][i]] = static_cast<std::int32_t>(j * 65536 + i);
		per_block_ = spec.m == 0 ? 0 : spec.m / spec.l;
		set_size_ = per_block_ == 0 ? 0 : space_ / per_block_;
		owner_.assign(spec.l, std::vector<std::int32_t>(space_, -1));
		for (std::size_t j = 0; j < spec.l; ++j)
			for (Minterm k = 0; k < space_; ++k)
				owner_[j][k] = spec.k1_owner(j, k);
	}

	std::vector<Minterm> trace(Rng &rng) const
	{
		std::vector<std::uint8_t> value_covered(spec_.l * space_, 0);
		std::vector<std::uint8_t> set_covered(spec_.l * std::max<std::size_t>(per_block_, 1), 0);
		std::vector<std::size_t> set_indiv(spec_.l * std::max<std::size_t>(per_block_, 1), 0);
		std::vector<Minterm> order(space_);
		for (Minterm x = 0; x < space_; ++x)
			order[x] = x;
		rng.shuffle(order);
		std::vector<Minterm> chosen;
		for (Minterm x : order) {
			bool eligible = false;
			for (std::size_t j = 0; j < spec_.l && !eligible; ++j) {
				auto [crit_here, s] = critical_in(j, x);
				if (crit_here) {
					eligible = !set_covered[j * per_block_ + s] && set_indiv[j * per_block_ + s] < set_size_;
				} else {
					Minterm k = x ^ spec_.x_g;
					int o = owner_[j][k];
					eligible = !value_covered[j * space_ + k] && (o < 0 || !set_covered[j * per_block_ + o]);
				}
			}
			if (!eligible)
				continue;
			chosen.push_back(x);
			for (std::size_t j = 0; j < spec_.l; ++j) {
				auto [crit_here, s] = critical_in(j, x);
				if (crit_here) {
					set_covered[j * per_block_ + s] = 1;
					continue;
				}
				Minterm k = x ^ spec_.x_g;
				if (value_covered[j * space_ + k])
					continue;
				value_covered[j * space_ + k] = 1;
				int o = owner_[j][k];
				if (o >= 0)
					++set_indiv[j * per_block_ + o];
			}
		}
		return chosen;
	}

private:
	std::pair<bool, std::size_t> critical_in(std::size_t j, Minterm x) const
	{
		std::int32_t c = crit_[x];
		if (c < 0 || static_cast<std::size_t>(c / 65536) != j)
			return {false, 0};
		return {true, static_cast<std::size_t>(c % 65536)};
	}

	const SasSpec &spec_;
	std::size_t space_;
	std::size_t per_block_ = 0, set_size_ = 0;
	std::vector<std::int32_t> crit_;
	std::vector<std::vector<std::int32_t>> owner_;
};

} // namespace

std::vector<Minterm> model_attack_trace(const SasSpec &spec, std::uint64_t seed)
{
	SasModel model(spec);
	Rng rng(seed);
	return model.trace(rng);
}

std::vector<std::uint64_t> model_attack_rounds(const SasSpec &spec, std::uint64_t trials, std::uint64_t seed,
	unsigned threads)
{
	SasModel model(spec);
	return run_trials(trials, threads, [&](std::uint64_t t) {
		Rng rng(derive_seed(seed, t));
		return static_cast<std::uint64_t>(model.trace(rng).size());
	});
}

std::vector<std::uint64_t> model_attack_rounds(const CoverageModel &model, std::uint64_t trials, std::uint64_t seed,
	unsigned threads)
{
	return run_trials(trials, threads, [&](std::uint64_t t) {
		Rng rng(derive_seed(seed, t));
		std::vector<std::uint8_t> covered(model.family_count, 0);
		std::vector<Minterm> order(model.families.size());
		for (Minterm x = 0; x < order.size(); ++x)
			order[x] = x;
		rng.shuffle(order);
		std::uint64_t rounds = 0;
		for (Minterm x : order) {
			const auto &fam = model.families[x];
			if (std::all_of(fam.begin(), fam.end(), [&](std::uint32_t f) { return covered[f]; }))
				continue;
			++rounds;
			for (auto f : fam)
				covered[f] = 1;
		}
		return rounds;
	});
}

CoverageModel sfll_coverage_model(const SfllSpec &spec)
{
	spec.validate();
	const std::size_t kb = spec.key_bits();
	if (kb > 16 || spec.n > 16)
		throw LimitError("SFLL-flex model needs c * k <= 16 and n <= 16");
	const std::size_t space = std::size_t{1} << spec.n;
	const std::uint64_t keys = std::uint64_t{1} << kb;
	std::vector<std::vector<unsigned>> care_pos(spec.c);
	for (std::size_t i = 0; i < spec.c; ++i)
		for (unsigned p = 0; p < spec.n; ++p)
			if (minterm_bit(spec.cubes[i].care, spec.n, p))
				care_pos[i].push_back(p);

	CoverageModel model;
	model.families.resize(space);
	std::vector<Minterm> values(spec.c);
	for (std::uint64_t key = 0; key < keys; ++key) {
		for (std::size_t i = 0; i < spec.c; ++i) {
			Minterm v = 0;
			for (std::size_t t = 0; t < spec.k; ++t)
				if ((key >> (kb - 1 - (i * spec.k + t))) & 1u)
					v |= Minterm{1} << (spec.n - 1 - care_pos[i][t]);
			values[i] = v;
		}
		std::vector<Minterm> hit;
		for (Minterm x = 0; x < space; ++x) {
			bool restore = false;
			for (std::size_t i = 0; i < spec.c && !restore; ++i)
				restore = (x & spec.cubes[i].care) == values[i];
			if (restore != spec.protects(x))
				hit.push_back(x);
		}
		if (hit.empty())
			continue;
		auto f = static_cast<std::uint32_t>(model.family_count++);
		for (Minterm x : hit)
			model.families[x].push_back(f);
	}
	return model;
}

CoverageModel coverage_model(const Circuit &locked, const Circuit &original, const InputDomain &inputs,
	const KeyDomain &keys, SweepOptions)
{
	if (keys.bits.size() > 16 || inputs.width() > 16)
		throw LimitError("coverage model limited to 16 key bits and 16 input bits");
	CoverageModel model;
	model.families.resize(std::size_t{1} << inputs.width());
	for (std::uint64_t k = 0; k < keys.size(); ++k) {
		auto hit = corrupted_set(locked, original, keys.key(k), inputs);
		if (hit.empty())
			continue;
		auto f = static_cast<std::uint32_t>(model.family_count++);
		for (Minterm x : hit)
			model.families[x].push_back(f);
	}
	return model;
}

IterationStats model_attack_sim(const SasSpec &spec, std::uint64_t trials, std::uint64_t seed, unsigned threads)
{
	return summarize_iterations(model_attack_rounds(spec, trials, seed, threads));
}

IterationStats model_attack_sim(const SfllSpec &spec, std::uint64_t trials, std::uint64_t seed, unsigned threads)
{
	return summarize_iterations(model_attack_rounds(sfll_coverage_model(spec), trials, seed, threads));
}

IterationStats model_attack_sim(const CoverageModel &model, std::uint64_t trials, std::uint64_t seed, unsigned threads)
{
	return summarize_iterations(model_attack_rounds(model, trials, seed, threads));
}

} // namespace saslab
