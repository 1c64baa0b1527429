#pragma once

#include "saslab/cnf.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace saslab {

enum class SolveResult { Sat, Unsat, Unknown };

/**
 * Satisfiability interface used by the attacks: clauses are lists of nonzero
 * DIMACS literals, solve() takes unit assumptions, and after a Sat verdict
 * model_value() reads the satisfying assignment.
 */
class SatEngine : public ClauseSink {
public:
	using ClauseSink::add_clause;

	virtual SolveResult solve(std::span<const int> assumptions) = 0;
	SolveResult solve() { return solve(std::span<const int>()); }
	virtual bool model_value(int var) const = 0;
	virtual int num_vars() const = 0;
	/// True when clauses can be added between solve() calls without losing learnt state.
	virtual bool incremental() const = 0;
	/// Variables decided before any other, in a per-solve shuffled order when
	/// phases are randomized.
	virtual void set_decision_priority(std::span<const int> vars) = 0;
};

struct SolverOptions {
	std::uint64_t seed = 0;
	/// Re-draw every saved phase before each solve; spreads models over the
	/// solution space instead of always preferring 0.
	bool random_phase = false;
	/// Conflicts allowed per solve() call; negative means unlimited.
	std::int64_t conflict_budget = -1;
};

/// Conflict-driven clause-learning solver: two watched literals, VSIDS,
/// first-UIP learning, phase saving, Luby restarts, learnt-clause reduction.
class CdclSolver final : public SatEngine {
public:
	explicit CdclSolver(SolverOptions options = {});
	~CdclSolver() override;
	CdclSolver(const CdclSolver &) = delete;
	CdclSolver &operator=(const CdclSolver &) = delete;

	int new_var() override;
	void add_clause(std::span<const int> literals) override;
	using SatEngine::add_clause;
	using SatEngine::solve;
	SolveResult solve(std::span<const int> assumptions) override;
	bool model_value(int var) const override;
	int num_vars() const override;
	bool incremental() const override { return true; }
	void set_decision_priority(std::span<const int> vars) override;

	std::uint64_t conflicts() const;
	std::uint64_t decisions() const;

private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

/// Non-incremental engine: records clauses and solves each query from scratch
/// with a fresh CdclSolver.
class ReplaySolver final : public SatEngine {
public:
	explicit ReplaySolver(SolverOptions options = {}) : options_(options) {}

	int new_var() override { return ++num_vars_; }
	void add_clause(std::span<const int> literals) override;
	using SatEngine::add_clause;
	using SatEngine::solve;
	SolveResult solve(std::span<const int> assumptions) override;
	bool model_value(int var) const override { return model_.at(var - 1); }
	int num_vars() const override { return num_vars_; }
	bool incremental() const override { return false; }
	void set_decision_priority(std::span<const int> vars) override { priority_.assign(vars.begin(), vars.end()); }

private:
	SolverOptions options_;
	int num_vars_ = 0;
	std::uint64_t solves_ = 0;
	std::vector<std::vector<int>> clauses_;
	std::vector<int> priority_;
	std::vector<bool> model_;
};

} // namespace saslab
