#pragma once

#include "saslab/netlist.hpp"

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace saslab {

/// Destination for Tseitin clauses; literals are DIMACS-style nonzero ints.
class ClauseSink {
public:
	virtual ~ClauseSink() = default;
	virtual int new_var() = 0;
	virtual void add_clause(std::span<const int> literals) = 0;

	void add_clause(std::initializer_list<int> literals) { add_clause(std::span<const int>(literals.begin(), literals.size())); }
};

struct CnfFormula : ClauseSink {
	int num_vars = 0;
	std::vector<std::vector<int>> clauses;
	std::map<std::string, int> wire_var;

	int new_var() override { return ++num_vars; }
	void add_clause(std::span<const int> literals) override { clauses.emplace_back(literals.begin(), literals.end()); }
	using ClauseSink::add_clause;
};

void write_dimacs(std::ostream &os, const CnfFormula &cnf);

/// Tseitin encoding with one variable per wire (plus chain variables for
/// XOR/XNOR with more than two inputs). `__zero`, when used, is a unit.
CnfFormula to_cnf(const Circuit &c);

/// Emits clauses forcing `out` == kind(ins).
void encode_gate(ClauseSink &sink, GateKind kind, int out, std::span<const int> ins);

/// Either a fixed bit or a literal.
struct Signal {
	int lit = 0;
	bool value = false;

	static Signal constant(bool v) { return {0, v}; }
	static Signal literal(int l) { return {l, false}; }
	bool is_constant() const { return lit == 0; }
	Signal negated() const { return is_constant() ? constant(!value) : literal(-lit); }
	friend bool operator==(const Signal &, const Signal &) = default;
};

/**
 * Encodes the output cone of `c` with constant folding: gates whose value is
 * fixed by constant inputs produce no clauses, single-literal gates alias their
 * input. `inputs` follows c.inputs(). Returns one signal per output.
 */
std::vector<Signal> encode_folded(const Circuit &c, std::span<const Signal> inputs, ClauseSink &sink);

/// Adds clauses forcing `s` to `value`; a contradictory constant adds the empty clause.
void force_signal(ClauseSink &sink, const Signal &s, bool value);

} // namespace saslab
