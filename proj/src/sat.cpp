#include "saslab/sat.hpp"

#include "saslab/bits.hpp"
#include "saslab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace saslab {

namespace {

using Lit = std::uint32_t;
using CRef = std::uint32_t;
constexpr CRef kNoReason = ~CRef{0};
constexpr Lit kUndefLit = ~Lit{0};
constexpr std::uint8_t kFalse = 0, kTrue = 1, kUndef = 2;

inline Lit make_lit(int dimacs)
{
	return static_cast<Lit>(2 * (std::abs(dimacs) - 1) + (dimacs < 0 ? 1 : 0));
}
inline Lit neg(Lit l) { return l ^ 1u; }
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool sign_of(Lit l) { return l & 1u; }

double luby(double y, std::uint64_t x)
{
	std::uint64_t size = 1, seq = 0;
	while (size < x + 1) {
		++seq;
		size = 2 * size + 1;
	}
	while (size - 1 != x) {
		size = (size - 1) >> 1;
		--seq;
		x = x % size;
	}
	return std::pow(y, static_cast<double>(seq));
}

struct Clause {
	std::vector<Lit> lits;
	double activity = 0;
	bool learnt = false;
	bool deleted = false;
};

struct Watcher {
	CRef cref;
	Lit blocker;
};

} // namespace

struct CdclSolver::Impl {
	SolverOptions options;
	Rng rng;
	bool ok = true;

	std::vector<Clause> clauses;
	std::vector<CRef> learnts;
	std::vector<std::vector<Watcher>> watches;

	std::vector<std::uint8_t> assigns;
	std::vector<int> level;
	std::vector<CRef> reason;
	std::vector<bool> polarity;
	std::vector<double> activity;
	std::vector<std::uint8_t> seen;
	std::vector<Lit> trail;
	std::vector<std::size_t> trail_lim;
	std::size_t qhead = 0;

	std::vector<int> heap;
	std::vector<int> heap_pos;

	double var_inc = 1.0;
	double cla_inc = 1.0;
	double max_learnts = 0;
	std::uint64_t conflicts = 0;
	std::uint64_t decisions = 0;
	std::vector<bool> model;
	std::vector<Lit> assumptions;
	std::vector<int> priority;

	explicit Impl(SolverOptions o) : options(o), rng(o.seed) {}

	int nvars() const { return static_cast<int>(assigns.size()); }
	int decision_level() const { return static_cast<int>(trail_lim.size()); }
	std::uint8_t value(Lit l) const
	{
		std::uint8_t a = assigns[var_of(l)];
		return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ sign_of(l));
	}

	// --- heap keyed by activity -----------------------------------------
	bool heap_less(int a, int b) const { return activity[a] > activity[b]; }
	void heap_up(std::size_t i)
	{
		int v = heap[i];
		while (i > 0) {
			std::size_t p = (i - 1) / 2;
			if (!heap_less(v, heap[p]))
				break;
			heap[i] = heap[p];
			heap_pos[heap[i]] = static_cast<int>(i);
			i = p;
		}
		heap[i] = v;
		heap_pos[v] = static_cast<int>(i);
	}
	void heap_down(std::size_t i)
	{
		int v = heap[i];
		while (true) {
			std::size_t l = 2 * i + 1;
			if (l >= heap.size())
				break;
			std::size_t c = (l + 1 < heap.size() && heap_less(heap[l + 1], heap[l])) ? l + 1 : l;
			if (!heap_less(heap[c], v))
				break;
			heap[i] = heap[c];
			heap_pos[heap[i]] = static_cast<int>(i);
			i = c;
		}
		heap[i] = v;
		heap_pos[v] = static_cast<int>(i);
	}
	void heap_insert(int v)
	{
		if (heap_pos[v] >= 0)
			return;
		heap.push_back(v);
		heap_up(heap.size() - 1);
	}
	int heap_pop()
	{
		int top = heap[0];
		heap_pos[top] = -1;
		int last = heap.back();
		heap.pop_back();
		if (!heap.empty()) {
			heap[0] = last;
			heap_pos[last] = 0;
			heap_down(0);
		}
		return top;
	}

	void bump_var(int v)
	{
		if ((activity[v] += var_inc) > 1e100) {
			for (double &a : activity)
				a *= 1e-100;
			var_inc *= 1e-100;
		}
		if (heap_pos[v] >= 0)
			heap_up(static_cast<std::size_t>(heap_pos[v]));
	}
	void bump_clause(Clause &c)
	{
		if ((c.activity += cla_inc) > 1e20) {
			for (CRef r : learnts)
				clauses[r].activity *= 1e-20;
			cla_inc *= 1e-20;
		}
	}

	int add_var()
	{
		int v = nvars();
		assigns.push_back(kUndef);
		level.push_back(0);
		reason.push_back(kNoReason);
		polarity.push_back(options.random_phase ? rng.coin() : false);
		activity.push_back(options.random_phase ? rng.unit() * 1e-5 : 0.0);
		seen.push_back(0);
		watches.emplace_back();
		watches.emplace_back();
		heap_pos.push_back(-1);
		heap_insert(v);
		return v + 1;
	}

	void enqueue(Lit l, CRef from)
	{
		std::uint32_t v = var_of(l);
		assigns[v] = sign_of(l) ? kFalse : kTrue;
		level[v] = decision_level();
		reason[v] = from;
		trail.push_back(l);
	}

	void attach(CRef cr)
	{
		const Clause &c = clauses[cr];
		watches[neg(c.lits[0])].push_back({cr, c.lits[1]});
		watches[neg(c.lits[1])].push_back({cr, c.lits[0]});
	}

	void cancel_until(int lvl)
	{
		if (decision_level() <= lvl)
			return;
		for (std::size_t i = trail.size(); i-- > trail_lim[static_cast<std::size_t>(lvl)];) {
			std::uint32_t v = var_of(trail[i]);
			assigns[v] = kUndef;
			reason[v] = kNoReason;
			polarity[v] = sign_of(trail[i]);
			heap_insert(static_cast<int>(v));
		}
		trail.resize(trail_lim[static_cast<std::size_t>(lvl)]);
		trail_lim.resize(static_cast<std::size_t>(lvl));
		qhead = trail.size();
	}

	CRef propagate()
	{
		CRef confl = kNoReason;
		while (qhead < trail.size()) {
			Lit p = trail[qhead++];
			Lit false_lit = neg(p);
			auto &ws = watches[p];
			std::size_t i = 0, j = 0;
			while (i < ws.size()) {
				Watcher w = ws[i++];
				Clause &c = clauses[w.cref];
				if (c.deleted)
					continue;
				if (value(w.blocker) == kTrue) {
					ws[j++] = w;
					continue;
				}
				if (c.lits[0] == false_lit)
					std::swap(c.lits[0], c.lits[1]);
				Lit first = c.lits[0];
				if (first != w.blocker && value(first) == kTrue) {
					ws[j++] = {w.cref, first};
					continue;
				}
				bool moved = false;
				for (std::size_t k = 2; k < c.lits.size(); ++k) {
					if (value(c.lits[k]) != kFalse) {
						std::swap(c.lits[1], c.lits[k]);
						watches[neg(c.lits[1])].push_back({w.cref, first});
						moved = true;
						break;
					}
				}
				if (moved)
					continue;
				ws[j++] = {w.cref, first};
				if (value(first) == kFalse) {
					confl = w.cref;
					qhead = trail.size();
					while (i < ws.size())
						ws[j++] = ws[i++];
				} else {
					enqueue(first, w.cref);
				}
			}
			ws.resize(j);
			if (confl != kNoReason)
				break;
		}
		return confl;
	}

	void analyze(CRef confl, std::vector<Lit> &out, int &bt_level)
	{
		int path = 0;
		Lit p = kUndefLit;
		out.assign(1, kUndefLit);
		std::size_t index = trail.size();
		do {
			Clause &c = clauses[confl];
			if (c.learnt)
				bump_clause(c);
			for (std::size_t j = (p == kUndefLit ? 0 : 1); j < c.lits.size(); ++j) {
				Lit q = c.lits[j];
				std::uint32_t v = var_of(q);
				if (!seen[v] && level[v] > 0) {
					bump_var(static_cast<int>(v));
					seen[v] = 1;
					if (level[v] >= decision_level())
						++path;
					else
						out.push_back(q);
				}
			}
			while (!seen[var_of(trail[--index])])
				;
			p = trail[index];
			confl = reason[var_of(p)];
			seen[var_of(p)] = 0;
			--path;
		} while (path > 0);
		out[0] = neg(p);

		// Local minimization: drop literals implied by other literals of the clause.
		std::vector<Lit> all(out.begin() + 1, out.end());
		std::size_t keep = 1;
		for (std::size_t i = 1; i < out.size(); ++i) {
			CRef r = reason[var_of(out[i])];
			bool redundant = r != kNoReason;
			if (redundant) {
				const Clause &rc = clauses[r];
				for (std::size_t k = 1; k < rc.lits.size(); ++k) {
					std::uint32_t v = var_of(rc.lits[k]);
					if (!seen[v] && level[v] > 0) {
						redundant = false;
						break;
					}
				}
			}
			if (!redundant)
				out[keep++] = out[i];
		}
		out.resize(keep);
		for (Lit l : all)
			seen[var_of(l)] = 0;

		bt_level = 0;
		if (out.size() > 1) {
			std::size_t max_i = 1;
			for (std::size_t i = 2; i < out.size(); ++i)
				if (level[var_of(out[i])] > level[var_of(out[max_i])])
					max_i = i;
			std::swap(out[1], out[max_i]);
			bt_level = level[var_of(out[1])];
		}
	}

	bool locked(CRef cr) const
	{
		const Clause &c = clauses[cr];
		return reason[var_of(c.lits[0])] == cr && value(c.lits[0]) == kTrue;
	}

	void reduce_db()
	{
		std::sort(learnts.begin(), learnts.end(), [&](CRef a, CRef b) {
			const Clause &x = clauses[a], &y = clauses[b];
			if ((x.lits.size() > 2) != (y.lits.size() > 2))
				return x.lits.size() > 2;
			return x.activity < y.activity;
		});
		std::size_t half = learnts.size() / 2;
		std::vector<CRef> kept;
		kept.reserve(learnts.size());
		for (std::size_t i = 0; i < learnts.size(); ++i) {
			Clause &c = clauses[learnts[i]];
			if (i < half && c.lits.size() > 2 && !locked(learnts[i])) {
				c.deleted = true;
				c.lits.clear();
				c.lits.shrink_to_fit();
			} else {
				kept.push_back(learnts[i]);
			}
		}
		learnts.swap(kept);
	}

	Lit pick_branch()
	{
		for (int v : priority)
			if (assigns[static_cast<std::size_t>(v)] == kUndef)
				return static_cast<Lit>(2 * v + (polarity[static_cast<std::size_t>(v)] ? 1 : 0));
		while (!heap.empty()) {
			int v = heap_pop();
			if (assigns[static_cast<std::size_t>(v)] == kUndef)
				return static_cast<Lit>(2 * v + (polarity[static_cast<std::size_t>(v)] ? 1 : 0));
		}
		return kUndefLit;
	}

	SolveResult search(std::uint64_t conflict_limit, std::int64_t &budget)
	{
		std::uint64_t local = 0;
		std::vector<Lit> learnt;
		while (true) {
			CRef confl = propagate();
			if (confl != kNoReason) {
				++conflicts;
				++local;
				if (budget > 0)
					--budget;
				if (decision_level() == 0) {
					ok = false;
					return SolveResult::Unsat;
				}
				int bt = 0;
				analyze(confl, learnt, bt);
				cancel_until(bt);
				if (learnt.size() == 1) {
					enqueue(learnt[0], kNoReason);
				} else {
					CRef cr = static_cast<CRef>(clauses.size());
					clauses.push_back(Clause{learnt, 0.0, true, false});
					learnts.push_back(cr);
					attach(cr);
					bump_clause(clauses[cr]);
					enqueue(learnt[0], cr);
				}
				var_inc /= 0.95;
				cla_inc /= 0.999;
				continue;
			}
			if (local >= conflict_limit || budget == 0) {
				cancel_until(0);
				return SolveResult::Unknown;
			}
			if (static_cast<double>(learnts.size()) - static_cast<double>(trail.size()) >= max_learnts) {
				reduce_db();
				max_learnts *= 1.1;
			}
			Lit next = kUndefLit;
			while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
				Lit a = assumptions[static_cast<std::size_t>(decision_level())];
				if (value(a) == kTrue) {
					trail_lim.push_back(trail.size());
				} else if (value(a) == kFalse) {
					return SolveResult::Unsat;
				} else {
					next = a;
					break;
				}
			}
			if (next == kUndefLit) {
				++decisions;
				next = pick_branch();
				if (next == kUndefLit) {
					model.assign(assigns.size(), false);
					for (std::size_t v = 0; v < assigns.size(); ++v)
						model[v] = assigns[v] == kTrue;
					return SolveResult::Sat;
				}
			}
			trail_lim.push_back(trail.size());
			enqueue(next, kNoReason);
		}
	}
};

CdclSolver::CdclSolver(SolverOptions options) : impl_(std::make_unique<Impl>(options)) {}
CdclSolver::~CdclSolver() = default;

int CdclSolver::new_var()
{
	return impl_->add_var();
}

int CdclSolver::num_vars() const
{
	return impl_->nvars();
}

std::uint64_t CdclSolver::conflicts() const
{
	return impl_->conflicts;
}

std::uint64_t CdclSolver::decisions() const
{
	return impl_->decisions;
}

void CdclSolver::add_clause(std::span<const int> literals)
{
	Impl &s = *impl_;
	if (!s.ok)
		return;
	s.cancel_until(0);
	std::vector<Lit> lits;
	lits.reserve(literals.size());
	for (int d : literals) {
		if (d == 0 || std::abs(d) > s.nvars())
			throw EngineError("literal " + std::to_string(d) + " out of range");
		lits.push_back(make_lit(d));
	}
	std::sort(lits.begin(), lits.end());
	lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
	std::size_t keep = 0;
	for (std::size_t i = 0; i < lits.size(); ++i) {
		if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i]))
			return; // tautology
		std::uint8_t v = s.value(lits[i]);
		if (v == kTrue)
			return;
		if (v == kUndef)
			lits[keep++] = lits[i];
	}
	lits.resize(keep);
	if (lits.empty()) {
		s.ok = false;
		return;
	}
	if (lits.size() == 1) {
		s.enqueue(lits[0], kNoReason);
		if (s.propagate() != kNoReason)
			s.ok = false;
		return;
	}
	CRef cr = static_cast<CRef>(s.clauses.size());
	s.clauses.push_back(Clause{std::move(lits), 0.0, false, false});
	s.attach(cr);
}

SolveResult CdclSolver::solve(std::span<const int> assumptions)
{
	Impl &s = *impl_;
	s.model.clear();
	if (!s.ok)
		return SolveResult::Unsat;
	s.cancel_until(0);
	s.assumptions.clear();
	for (int d : assumptions) {
		if (d == 0 || std::abs(d) > s.nvars())
			throw EngineError("assumption " + std::to_string(d) + " out of range");
		s.assumptions.push_back(make_lit(d));
	}
	if (s.options.random_phase) {
		for (std::size_t v = 0; v < s.polarity.size(); ++v)
			s.polarity[v] = s.rng.coin();
		s.rng.shuffle(s.priority);
	}
	s.max_learnts = std::max(1000.0, static_cast<double>(s.clauses.size() - s.learnts.size()) / 3.0);

	std::int64_t budget = s.options.conflict_budget;
	SolveResult result = SolveResult::Unknown;
	for (std::uint64_t restart = 0; result == SolveResult::Unknown; ++restart) {
		auto limit = static_cast<std::uint64_t>(luby(2.0, restart) * 100.0);
		result = s.search(limit, budget);
		if (result == SolveResult::Unknown && budget == 0)
			break;
	}
	s.cancel_until(0);
	return result;
}

void CdclSolver::set_decision_priority(std::span<const int> vars)
{
	Impl &s = *impl_;
	s.priority.clear();
	for (int v : vars) {
		if (v <= 0 || v > s.nvars())
			throw EngineError("priority variable " + std::to_string(v) + " out of range");
		s.priority.push_back(v - 1);
	}
}

bool CdclSolver::model_value(int var) const
{
	const auto &m = impl_->model;
	if (var <= 0 || static_cast<std::size_t>(var) > m.size())
		throw EngineError("no model value for variable " + std::to_string(var));
	return m[static_cast<std::size_t>(var - 1)];
}

void ReplaySolver::add_clause(std::span<const int> literals)
{
	for (int d : literals)
		if (d == 0 || std::abs(d) > num_vars_)
			throw EngineError("literal " + std::to_string(d) + " out of range");
	clauses_.emplace_back(literals.begin(), literals.end());
}

SolveResult ReplaySolver::solve(std::span<const int> assumptions)
{
	SolverOptions opts = options_;
	opts.seed = derive_seed(options_.seed, solves_++);
	CdclSolver fresh(opts);
	for (int v = 0; v < num_vars_; ++v)
		fresh.new_var();
	for (const auto &cl : clauses_)
		fresh.add_clause(cl);
	fresh.set_decision_priority(priority_);
	SolveResult r = fresh.solve(assumptions);
	model_.clear();
	if (r == SolveResult::Sat) {
		model_.resize(static_cast<std::size_t>(num_vars_));
		for (int v = 1; v <= num_vars_; ++v)
			model_[static_cast<std::size_t>(v - 1)] = fresh.model_value(v);
	}
	return r;
}

} // namespace saslab
