#pragma once

#include "saslab/bits.hpp"
#include "saslab/locking.hpp"
#include "saslab/metrics.hpp"
#include "saslab/netlist.hpp"
#include "saslab/sat.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace saslab {

/**
 * Activated chip: answers output queries from a key-free circuit (the
 * original, or a locked circuit with the correct key bound). Thread-safe.
 */
class Oracle {
public:
	explicit Oracle(Circuit circuit);
	Oracle(const Oracle &) = delete;
	Oracle &operator=(const Oracle &) = delete;

	/// Inputs are looked up by name; missing inputs are an error.
	BitVector query(const Assignment &inputs) const;
	const Circuit &circuit() const { return circuit_; }
	std::uint64_t queries() const { return queries_.load(); }

private:
	Circuit circuit_;
	mutable std::atomic<std::uint64_t> queries_{0};
};

enum class Termination { Exhausted, IterationLimit, TimeLimit };

std::string_view to_string(Termination t);

struct DiRecord {
	/// Non-key inputs of the locked circuit, in circuit order.
	BitVector inputs;
	BitVector outputs;
};

struct AttackResult {
	BitVector recovered_key;
	std::size_t iterations = 0;
	std::vector<std::string> input_names;
	std::vector<DiRecord> di_log;
	Termination termination = Termination::Exhausted;
	double wall_seconds = 0;
	std::uint64_t oracle_queries = 0;
};

/// Decision order of the attack's solver.
enum class Branching {
	/// Plain VSIDS over all variables.
	Vsids,
	/// Primary-input variables first, with fresh random phases per solve.
	/// Approximates drawing the DI uniformly among remaining candidates.
	InputsFirst,
};

std::string_view to_string(Branching b);
std::optional<Branching> parse_branching(std::string_view text);

struct AttackOptions {
	std::uint64_t iteration_limit = 1'000'000;
	/// Seconds; 0 means no limit.
	double time_limit = 0;
	std::uint64_t seed = 0;
	/// Reuse one CdclSolver across iterations; otherwise re-solve from scratch.
	bool incremental = true;
	Branching branching = Branching::InputsFirst;
	/// Re-simulate both model keys on every logged DI each iteration.
	bool check_invariants = true;
	/// When set, the formula is written as DIMACS after every iteration.
	std::string dump_cnf_dir;
};

/**
 * Oracle-guided SAT attack. Each iteration finds X with two keys that agree
 * with every logged oracle response but disagree on X, queries the oracle on
 * X, and appends the I/O constraint for both key copies. When no such X is
 * left, any key consistent with the log is returned.
 *
 * Throws SpecError when the circuit has no key inputs, EngineError when the
 * log admits no key.
 */
AttackResult sat_attack(const Circuit &locked, const Oracle &oracle, const AttackOptions &options = {});

struct ApproximateResult {
	AttackResult attack;
	/// Disagreement rate of the returned key against the oracle over uniform
	/// samples of all non-key inputs.
	Estimate error;
};

/// The SAT attack stopped after `settle_window` iterations.
ApproximateResult approximate_sat_attack(const Circuit &locked, const Oracle &oracle, std::uint64_t settle_window,
	std::uint64_t sample_count, std::uint64_t seed, AttackOptions options = {});

struct RemovalResult {
	Circuit circuit;
	std::vector<std::string> removed_wires;
};

/// Candidate wire considered by the automatic removal attack.
struct RemovalCandidate {
	std::string wire;
	double skew = 0;
};

/// Key-dependent wires with a single fanout into a 2-input XOR whose other
/// operand does not depend on any key input, most skewed first.
std::vector<RemovalCandidate> removal_candidates(const Circuit &locked);

inline constexpr double kRemovalSkewThreshold = 0.45;

/**
 * Ties locking outputs to 0 and removes the dead locking cone, dropping key
 * inputs left without fanout. Without a target, every most-downstream
 * candidate whose own skew, or the skew of a candidate in its fan-in, exceeds
 * the threshold is removed (the most skewed candidate when none does).
 */
RemovalResult removal_attack(const Circuit &locked, const std::optional<std::string> &target_wire = std::nullopt);

struct IterationStats {
	std::uint64_t trials = 0;
	double mean = 0;
	double variance = 0;
	double std_error = 0;
	std::uint64_t min = 0;
	std::uint64_t max = 0;
	std::map<std::uint64_t, std::uint64_t> histogram;
};

IterationStats summarize_iterations(const std::vector<std::uint64_t> &counts);

/**
 * Wrong-key coverage of each minterm: minterm x rules out the wrong keys in
 * families[x] (indices into a universe of `family_count` families).
 */
struct CoverageModel {
	std::size_t family_count = 0;
	std::vector<std::vector<std::uint32_t>> families;
};

/// Coverage model of a SFLL-flex spec by key enumeration (c * k <= 16).
CoverageModel sfll_coverage_model(const SfllSpec &spec);
/// Coverage model from an exhaustive sweep of a locked circuit (one family per wrong key).
CoverageModel coverage_model(const Circuit &locked, const Circuit &original, const InputDomain &inputs,
	const KeyDomain &keys, SweepOptions options = {});

/**
 * Uniform-random-DI model of the SAT attack: each round draws a DI uniformly
 * among minterms that still rule out some uncovered wrong-key family, until
 * every family is covered. Returns per-trial round counts.
 */
std::vector<std::uint64_t> model_attack_rounds(const SasSpec &spec, std::uint64_t trials, std::uint64_t seed,
	unsigned threads = 1);
std::vector<std::uint64_t> model_attack_rounds(const CoverageModel &model, std::uint64_t trials, std::uint64_t seed,
	unsigned threads = 1);

IterationStats model_attack_sim(const SasSpec &spec, std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);
IterationStats model_attack_sim(const SfllSpec &spec, std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);
IterationStats model_attack_sim(const CoverageModel &model, std::uint64_t trials, std::uint64_t seed,
	unsigned threads = 1);

/// One round sequence of the SAS model; exposes the chosen DIs for property tests.
std::vector<Minterm> model_attack_trace(const SasSpec &spec, std::uint64_t seed);

} // namespace saslab
