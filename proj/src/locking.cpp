#include "saslab/locking.hpp"

#include "saslab/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

namespace saslab {

std::string_view to_string(Scheme scheme)
{
	switch (scheme) {
	case Scheme::Sas:
		return "sas";
	case Scheme::Rsas:
		return "rsas";
	case Scheme::AntiSat:
		return "antisat";
	case Scheme::SfllFlex:
		return "sfll-flex";
	}
	return "?";
}

std::optional<Scheme> parse_scheme(std::string_view text)
{
	std::string lower(text);
	for (char &ch : lower)
		ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
	for (Scheme s : {Scheme::Sas, Scheme::Rsas, Scheme::AntiSat, Scheme::SfllFlex})
		if (lower == to_string(s))
			return s;
	return std::nullopt;
}

// ---------------------------------------------------------------------------
// Partition and spec

namespace {

void check_width(unsigned n)
{
	if (n == 0 || n > 32)
		throw SpecError("slice width n must be in [1, 32], got " + std::to_string(n));
}

void check_counts(unsigned n, unsigned m, unsigned l)
{
	if (!is_power_of_two(m))
		throw SpecError("m must be a power of two, got " + std::to_string(m));
	if (!is_power_of_two(l) || l > m)
		throw SpecError("l must be a power of two with l <= m");
	if (n > kMaxPartitionWidth)
		throw LimitError("partitions are limited to n <= " + std::to_string(kMaxPartitionWidth));
	if (m > (Minterm{1} << n))
		throw SpecError("m must divide 2^n");
}

} // namespace

Partition make_partition(std::vector<Minterm> critical, unsigned n, unsigned m, unsigned l, Minterm x_g,
	std::uint64_t seed)
{
	check_width(n);
	check_counts(n, m, l);
	if (critical.size() != m)
		throw SpecError("expected " + std::to_string(m) + " critical minterms, got " + std::to_string(critical.size()));
	const Minterm mask = minterm_mask(n);
	std::sort(critical.begin(), critical.end());
	for (std::size_t i = 0; i < critical.size(); ++i) {
		if (critical[i] > mask)
			throw SpecError("critical minterm " + std::to_string(critical[i]) + " exceeds n bits");
		if (i > 0 && critical[i] == critical[i - 1])
			throw SpecError("duplicate critical minterm " + minterm_to_hex(critical[i], n));
	}

	Partition p;
	p.blocks.resize(l);
	for (std::size_t i = 0; i < critical.size(); ++i)
		p.blocks[i % l].push_back(critical[i]);

	const std::size_t space = std::size_t{1} << n;
	const std::size_t set_size = space / (m / l);
	p.k1_sets.resize(l);
	for (unsigned j = 0; j < l; ++j) {
		std::vector<bool> claimed(space, false);
		for (Minterm x : p.blocks[j]) {
			Minterm natural = (x ^ x_g) & mask;
			if (claimed[natural])
				throw SpecError("natural-key collision in block " + std::to_string(j));
			claimed[natural] = true;
		}
		std::vector<Minterm> pool;
		pool.reserve(space - p.blocks[j].size());
		for (Minterm k = 0; k < space; ++k)
			if (!claimed[k])
				pool.push_back(k);
		Rng rng(derive_seed(seed, j));
		rng.shuffle(pool);
		std::size_t next = 0;
		for (Minterm x : p.blocks[j]) {
			std::vector<Minterm> set{(x ^ x_g) & mask};
			while (set.size() < set_size)
				set.push_back(pool[next++]);
			p.k1_sets[j].push_back(std::move(set));
		}
	}
	return p;
}

void SasSpec::finalize()
{
	check_width(n);
	const Minterm mask = minterm_mask(n);
	if (x_g > mask)
		throw SpecError("x_g exceeds n bits");
	if (polarity_mask != 0)
		throw SpecError("only the all-XOR polarity (polarity_mask = 0) is supported");
	if (!insertion_wires.empty() && insertion_wires.size() != l)
		throw SpecError("expected " + std::to_string(l) + " insertion wires");
	if (!input_slice.empty() && input_slice.size() != n)
		throw SpecError("input slice must name exactly n inputs");
	owner_.clear();

	if (m == 0) {
		if (l != 1)
			throw SpecError("an Anti-SAT spec (m = 0) has exactly one block");
		blocks.assign(1, {});
		k1_sets.assign(1, {});
		return;
	}
	check_counts(n, m, l);
	if (blocks.size() != l || k1_sets.size() != l)
		throw SpecError("spec must list exactly l blocks and l K1 partitions");
	const std::size_t space = std::size_t{1} << n;
	const std::size_t per_block = m / l;
	const std::size_t set_size = space / per_block;
	std::set<Minterm> seen;
	owner_.assign(l, std::vector<std::int32_t>(space, -1));
	for (std::size_t j = 0; j < l; ++j) {
		if (blocks[j].size() != per_block)
			throw SpecError("block " + std::to_string(j) + " must hold m/l critical minterms");
		if (k1_sets[j].size() != per_block)
			throw SpecError("block " + std::to_string(j) + " needs one K1 set per critical minterm");
		for (std::size_t i = 0; i < per_block; ++i) {
			Minterm x = blocks[j][i];
			if (x > mask)
				throw SpecError("critical minterm exceeds n bits");
			if (!seen.insert(x).second)
				throw SpecError("critical minterm " + minterm_to_hex(x, n) + " listed twice");
			const auto &set = k1_sets[j][i];
			if (set.size() != set_size)
				throw SpecError("K1 set of " + minterm_to_hex(x, n) + " must have 2^n/(m/l) elements");
			bool natural = false;
			for (Minterm k : set) {
				if (k > mask)
					throw SpecError("K1 value exceeds n bits");
				if (owner_[j][k] >= 0)
					throw SpecError("K1 sets of block " + std::to_string(j) + " overlap");
				owner_[j][k] = static_cast<std::int32_t>(i);
				natural |= k == (x ^ x_g);
			}
			if (!natural)
				throw SpecError("K1 set of " + minterm_to_hex(x, n) + " lacks its natural key X ^ x_g");
		}
	}
}

std::vector<Minterm> SasSpec::critical_minterms() const
{
	std::vector<Minterm> all;
	for (const auto &b : blocks)
		all.insert(all.end(), b.begin(), b.end());
	std::sort(all.begin(), all.end());
	return all;
}

int SasSpec::critical_index(std::size_t j, Minterm x) const
{
	const auto &b = blocks.at(j);
	auto it = std::find(b.begin(), b.end(), x);
	return it == b.end() ? -1 : static_cast<int>(it - b.begin());
}

int SasSpec::k1_owner(std::size_t j, Minterm k1) const
{
	if (owner_.empty())
		return -1;
	return owner_.at(j).at(k1);
}

SasSpec make_sas_spec(unsigned n, std::vector<Minterm> critical, unsigned l, Minterm x_g, std::uint64_t seed,
	std::vector<std::string> insertion_wires, std::vector<std::string> input_slice)
{
	SasSpec spec;
	spec.n = n;
	spec.m = static_cast<unsigned>(critical.size());
	spec.l = l;
	spec.x_g = x_g;
	Partition p = make_partition(std::move(critical), n, spec.m, l, x_g, seed);
	spec.blocks = std::move(p.blocks);
	spec.k1_sets = std::move(p.k1_sets);
	spec.insertion_wires = std::move(insertion_wires);
	spec.input_slice = std::move(input_slice);
	spec.finalize();
	return spec;
}

SasSpec make_antisat_spec(unsigned n, Minterm x_g, std::string insertion_wire, std::vector<std::string> input_slice)
{
	SasSpec spec;
	spec.n = n;
	spec.x_g = x_g;
	if (!insertion_wire.empty())
		spec.insertion_wires.push_back(std::move(insertion_wire));
	spec.input_slice = std::move(input_slice);
	spec.finalize();
	return spec;
}

void SfllSpec::validate() const
{
	check_width(n);
	if (k == 0 || k > n)
		throw SpecError("SFLL-flex needs 1 <= k <= n");
	if (c == 0 || cubes.size() != c)
		throw SpecError("SFLL-flex needs c >= 1 cubes, listed explicitly");
	if (!input_slice.empty() && input_slice.size() != n)
		throw SpecError("input slice must name exactly n inputs");
	const Minterm mask = minterm_mask(n);
	for (std::size_t i = 0; i < cubes.size(); ++i) {
		const Cube &a = cubes[i];
		if ((a.care & ~mask) != 0 || static_cast<unsigned>(std::popcount(a.care)) != k)
			throw SpecError("cube " + std::to_string(i) + " must have exactly k care bits within n");
		if ((a.value & ~a.care) != 0)
			throw SpecError("cube " + std::to_string(i) + " has value bits outside its care mask");
		for (std::size_t j = 0; j < i; ++j) {
			const Cube &b = cubes[j];
			if (((a.value ^ b.value) & a.care & b.care) == 0)
				throw SpecError("cubes " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
		}
	}
}

bool SfllSpec::protects(Minterm x) const
{
	return std::any_of(cubes.begin(), cubes.end(), [&](const Cube &cube) { return cube.contains(x); });
}

SfllSpec make_sfll_spec(unsigned n, unsigned k, const std::vector<Minterm> &protected_minterms,
	std::string insertion_wire, std::vector<std::string> input_slice)
{
	check_width(n);
	if (k == 0 || k > n)
		throw SpecError("SFLL-flex needs 1 <= k <= n");
	SfllSpec spec;
	spec.n = n;
	spec.k = k;
	spec.c = static_cast<unsigned>(protected_minterms.size());
	const Minterm care = minterm_mask(n) & ~minterm_mask(n - k);
	for (Minterm x : protected_minterms)
		spec.cubes.push_back(Cube{x & care, care});
	spec.insertion_wire = std::move(insertion_wire);
	spec.input_slice = std::move(input_slice);
	spec.validate();
	return spec;
}

// ---------------------------------------------------------------------------
// Keys

std::string key_input_name(std::size_t index)
{
	return "keyinput" + std::to_string(index);
}

namespace {

std::optional<std::size_t> key_index(std::string_view name)
{
	constexpr std::string_view prefix = "keyinput";
	if (!name.starts_with(prefix) || name.size() == prefix.size())
		return std::nullopt;
	std::size_t v = 0;
	for (char ch : name.substr(prefix.size())) {
		if (ch < '0' || ch > '9')
			return std::nullopt;
		v = v * 10 + static_cast<std::size_t>(ch - '0');
	}
	return v;
}

} // namespace

std::vector<std::string> key_input_names(const Circuit &c)
{
	std::map<std::size_t, std::string> found;
	for (const auto &in : c.inputs())
		if (auto idx = key_index(in))
			found.emplace(*idx, in);
	std::vector<std::string> names;
	for (const auto &[idx, name] : found) {
		if (idx != names.size() || name != key_input_name(idx))
			throw NetlistError("key inputs must be keyinput0..keyinput" + std::to_string(found.size() - 1));
		names.push_back(name);
	}
	return names;
}

Circuit bind_key(const Circuit &locked, const BitVector &key)
{
	auto names = key_input_names(locked);
	if (names.size() != key.size())
		throw SpecError("key has " + std::to_string(key.size()) + " bits, circuit has " +
			std::to_string(names.size()) + " key inputs");
	Assignment values;
	for (std::size_t i = 0; i < names.size(); ++i)
		values[names[i]] = key[i];
	return bind_inputs(locked, values);
}

const std::vector<std::string> &LockedCircuit::input_slice() const
{
	return std::holds_alternative<SasSpec>(spec) ? sas().input_slice : sfll().input_slice;
}

bool LockedCircuit::is_correct_key(const BitVector &key) const
{
	if (key.size() != correct_key.size())
		return false;
	if (const auto *s = std::get_if<SasSpec>(&spec)) {
		for (std::size_t j = 0; j < s->l; ++j)
			if (key.slice(2 * s->n * j, s->n) != key.slice(2 * s->n * j + s->n, s->n))
				return false;
		return true;
	}
	const SfllSpec &f = sfll();
	std::set<std::pair<Minterm, Minterm>> want, got;
	for (std::size_t i = 0; i < f.cubes.size(); ++i) {
		want.emplace(f.cubes[i].value, f.cubes[i].care);
		Minterm value = 0;
		std::size_t t = 0;
		for (unsigned p = 0; p < f.n; ++p) {
			if (!minterm_bit(f.cubes[i].care, f.n, p))
				continue;
			if (key[i * f.k + t++])
				value |= Minterm{1} << (f.n - 1 - p);
		}
		got.emplace(value, f.cubes[i].care);
	}
	return want == got;
}

// ---------------------------------------------------------------------------
// Functional model

bool sas_block_output(const SasSpec &spec, std::size_t j, Minterm x, Minterm k1, Minterm k2)
{
	Minterm xp = x;
	int idx = spec.critical_index(j, x);
	if (idx >= 0) {
		xp = spec.x_g ^ k1;
		if (spec.k1_owner(j, k1) != idx)
			xp ^= 1;
	}
	return ((xp ^ k1) == spec.x_g) && ((xp ^ k2) != spec.x_g);
}

bool rsas_block_output(const SasSpec &spec, std::size_t j, Minterm x, Minterm k1, Minterm k2)
{
	return sas_block_output(spec, j, x, k1, k2) != (spec.critical_index(j, x) >= 0);
}

// ---------------------------------------------------------------------------
// Netlist construction

namespace {

/// Appends gates with unique names under a fixed prefix.
class GateBuilder {
public:
	GateBuilder(std::vector<Gate> &gates, std::string prefix) : gates_(gates), prefix_(std::move(prefix)) {}

	std::string add(GateKind kind, std::vector<std::string> ins, std::string_view stem, std::string name = {})
	{
		if (name.empty())
			name = prefix_ + std::string(stem) + std::to_string(counter_++);
		gates_.push_back(Gate{name, kind, std::move(ins)});
		return name;
	}

	std::string negate(const std::string &w)
	{
		auto it = negations_.find(w);
		if (it != negations_.end())
			return it->second;
		return negations_[w] = add(GateKind::Not, {w}, "n");
	}

	/// w when bit is 1, NOT(w) when 0.
	std::string literal(const std::string &w, bool bit) { return bit ? w : negate(w); }

	std::string constant(bool v)
	{
		std::string &slot = v ? one_ : zero_;
		if (slot.empty())
			slot = add(v ? GateKind::Not : GateKind::Buf, {std::string(Circuit::kZeroWire)}, v ? "one" : "zero");
		return slot;
	}

	std::string and_of(std::vector<std::string> ins, std::string_view stem, std::string name = {})
	{
		return reduce(GateKind::And, std::move(ins), stem, std::move(name), true);
	}

	std::string or_of(std::vector<std::string> ins, std::string_view stem, std::string name = {})
	{
		return reduce(GateKind::Or, std::move(ins), stem, std::move(name), false);
	}

	std::string mux(const std::string &sel, const std::string &hi, const std::string &lo, std::string_view stem)
	{
		std::string a = add(GateKind::And, {sel, hi}, stem);
		std::string b = add(GateKind::And, {negate(sel), lo}, stem);
		return add(GateKind::Or, {a, b}, stem);
	}

private:
	std::string reduce(GateKind kind, std::vector<std::string> ins, std::string_view stem, std::string name,
		bool empty_value)
	{
		if (ins.empty())
			ins.push_back(constant(empty_value));
		if (ins.size() == 1)
			return name.empty() ? ins[0] : add(GateKind::Buf, std::move(ins), stem, std::move(name));
		return add(kind, std::move(ins), stem, std::move(name));
	}

	std::vector<Gate> &gates_;
	std::string prefix_;
	std::size_t counter_ = 0;
	std::map<std::string, std::string> negations_;
	std::string zero_, one_;
};

/// Reduced ordered BDD of a truth table over `vars` (vars[0] is the MSB of the
/// table index), emitted as mux-style gates. Returns the root wire.
class BddEmitter {
public:
	BddEmitter(GateBuilder &b, const std::vector<std::string> &vars) : b_(b), vars_(vars) {}

	std::string emit(const std::vector<bool> &table, std::string_view stem)
	{
		nodes_.clear();
		unique_.clear();
		int root = build(table, 0, 0);
		std::map<int, std::string> wires;
		return wire(root, wires, stem);
	}

private:
	struct Node {
		unsigned level;
		int lo, hi;
	};

	// Node ids: 0 and 1 are terminals, 2 + i is nodes_[i].
	int build(const std::vector<bool> &table, unsigned level, std::size_t base)
	{
		const std::size_t span = std::size_t{1} << (vars_.size() - level);
		if (level == vars_.size())
			return table[base] ? 1 : 0;
		int lo = build(table, level + 1, base);
		int hi = build(table, level + 1, base + span / 2);
		if (lo == hi)
			return lo;
		auto key = std::make_tuple(level, lo, hi);
		auto it = unique_.find(key);
		if (it != unique_.end())
			return it->second;
		nodes_.push_back(Node{level, lo, hi});
		int id = static_cast<int>(nodes_.size()) + 1;
		unique_.emplace(key, id);
		return id;
	}

	std::string wire(int id, std::map<int, std::string> &wires, std::string_view stem)
	{
		if (id < 2)
			return b_.constant(id == 1);
		auto it = wires.find(id);
		if (it != wires.end())
			return it->second;
		const Node node = nodes_[static_cast<std::size_t>(id - 2)];
		const std::string &v = vars_[node.level];
		std::string out;
		if (node.lo == 0 && node.hi == 1)
			out = v;
		else if (node.lo == 1 && node.hi == 0)
			out = b_.negate(v);
		else if (node.lo == 0)
			out = b_.add(GateKind::And, {v, wire(node.hi, wires, stem)}, stem);
		else if (node.hi == 0)
			out = b_.add(GateKind::And, {b_.negate(v), wire(node.lo, wires, stem)}, stem);
		else if (node.hi == 1)
			out = b_.add(GateKind::Or, {v, wire(node.lo, wires, stem)}, stem);
		else if (node.lo == 1)
			out = b_.add(GateKind::Or, {b_.negate(v), wire(node.hi, wires, stem)}, stem);
		else
			out = b_.mux(v, wire(node.hi, wires, stem), wire(node.lo, wires, stem), stem);
		wires.emplace(id, out);
		return out;
	}

	GateBuilder &b_;
	const std::vector<std::string> &vars_;
	std::vector<Node> nodes_;
	std::map<std::tuple<unsigned, int, int>, int> unique_;
};

/// AND of slice literals matching `value` on the positions in `care`.
std::string cube_detector(GateBuilder &b, const std::vector<std::string> &x, unsigned n, Minterm value, Minterm care,
	std::string_view stem)
{
	std::vector<std::string> lits;
	for (unsigned p = 0; p < n; ++p)
		if (minterm_bit(care, n, p))
			lits.push_back(b.literal(x[p], minterm_bit(value, n, p)));
	return b.and_of(std::move(lits), stem);
}

struct BlockWires {
	std::string y;
	std::string is_crit;
};

BlockWires emit_sas_block(GateBuilder &b, const SasSpec &spec, std::size_t j, const std::vector<std::string> &x,
	const std::vector<std::string> &k1, const std::vector<std::string> &k2, bool rsas, const std::string &out_name)
{
	const unsigned n = spec.n;
	const auto &block = spec.blocks.at(j);
	std::vector<std::string> xp = x;
	std::string is_crit;
	if (!block.empty()) {
		const Minterm mask = minterm_mask(n);
		std::vector<std::string> crit, member_terms;
		BddEmitter bdd(b, k1);
		for (std::size_t i = 0; i < block.size(); ++i) {
			crit.push_back(cube_detector(b, x, n, block[i], mask, "crit"));
			std::vector<bool> table(std::size_t{1} << n, false);
			for (Minterm k : spec.k1_sets[j][i])
				table[k] = true;
			std::string mem = bdd.emit(table, "mem");
			member_terms.push_back(b.and_of({crit.back(), mem}, "own"));
		}
		is_crit = b.or_of(crit, "iscrit");
		std::string member = b.or_of(member_terms, "member");
		// H on critical minterms: x_g ^ K1, LSB flipped unless K1 is in the minterm's set.
		for (unsigned p = 0; p < n; ++p) {
			bool xg = minterm_bit(spec.x_g, n, p);
			std::string target;
			if (p + 1 == n)
				target = b.add(xg ? GateKind::Xor : GateKind::Xnor, {k1[p], member}, "h");
			else
				target = b.literal(k1[p], !xg);
			xp[p] = b.mux(is_crit, target, x[p], "xp");
		}
	}
	std::vector<std::string> g_lits, gb_lits;
	for (unsigned p = 0; p < n; ++p) {
		bool xg = minterm_bit(spec.x_g, n, p);
		g_lits.push_back(b.literal(b.add(GateKind::Xor, {xp[p], k1[p]}, "a"), xg));
		gb_lits.push_back(b.literal(b.add(GateKind::Xor, {xp[p], k2[p]}, "b"), xg));
	}
	std::string g = b.and_of(g_lits, "g");
	std::string g2 = b.and_of(gb_lits, "g");
	if (rsas) {
		std::string y = b.add(GateKind::And, {g, b.negate(g2)}, "y");
		return {b.add(GateKind::Xor, {y, is_crit}, "yr", out_name), is_crit};
	}
	return {b.add(GateKind::And, {g, b.negate(g2)}, "y", out_name), is_crit};
}

/// Prefix no existing wire of `c` starts with.
std::string unique_prefix(const Circuit &c, const std::string &base)
{
	auto clashes = [&](const std::string &prefix) {
		for (Circuit::WireId w = 0; w < c.wire_count(); ++w)
			if (c.wire_name(w).starts_with(prefix))
				return true;
		return false;
	};
	if (!clashes(base + "_"))
		return base + "_";
	for (std::size_t i = 1;; ++i) {
		std::string candidate = base + std::to_string(i) + "_";
		if (!clashes(candidate))
			return candidate;
	}
}

void check_slice(const Circuit &c, const std::vector<std::string> &slice)
{
	std::set<std::string> seen;
	for (const auto &name : slice) {
		if (std::find(c.inputs().begin(), c.inputs().end(), name) == c.inputs().end())
			throw SpecError("input slice names '" + name + "', which is not a primary input");
		if (!seen.insert(name).second)
			throw SpecError("input slice lists '" + name + "' twice");
	}
}

void check_wire(const Circuit &c, const std::string &wire)
{
	auto id = c.find_wire(wire);
	if (!id || *id == c.zero_wire())
		throw SpecError("insertion wire '" + wire + "' does not exist");
}

std::vector<std::string> add_key_inputs(const Circuit &c, std::vector<std::string> &inputs, std::size_t count)
{
	for (const auto &in : c.inputs())
		if (key_index(in))
			throw SpecError("circuit already has key inputs");
	std::vector<std::string> keys;
	for (std::size_t i = 0; i < count; ++i) {
		keys.push_back(key_input_name(i));
		if (c.has_wire(keys.back()))
			throw SpecError("wire '" + keys.back() + "' already exists");
		inputs.push_back(keys.back());
	}
	return keys;
}

std::vector<std::string> default_slice(const Circuit &c, unsigned n)
{
	if (c.inputs().size() < n)
		throw SpecError("circuit has fewer than n = " + std::to_string(n) + " primary inputs");
	return {c.inputs().begin(), c.inputs().begin() + n};
}

LockedCircuit lock_sas_family(const Circuit &c, SasSpec spec, std::uint64_t seed, Scheme scheme)
{
	resolve_defaults(spec, c);
	spec.finalize();
	const unsigned n = spec.n;
	if (scheme == Scheme::Rsas && spec.is_antisat())
		throw SpecError("RSAS needs at least one critical minterm");

	std::vector<std::string> inputs = c.inputs();
	std::vector<Gate> gates = c.gates();
	auto keys = add_key_inputs(c, inputs, spec.key_bits());

	BitVector key(spec.key_bits());
	std::vector<std::string> outs;
	for (std::size_t j = 0; j < spec.l; ++j) {
		Rng rng(derive_seed(seed, 0x5a5 + j));
		Minterm k = rng.next() & minterm_mask(n);
		key.assign_slice(2 * n * j, n, k);
		key.assign_slice(2 * n * j + n, n, k);

		std::vector<std::string> k1(keys.begin() + 2 * n * j, keys.begin() + 2 * n * j + n);
		std::vector<std::string> k2(keys.begin() + 2 * n * j + n, keys.begin() + 2 * n * (j + 1));
		GateBuilder b(gates, unique_prefix(c, "sas" + std::to_string(j)));
		auto wires = emit_sas_block(b, spec, j, spec.input_slice, k1, k2, scheme == Scheme::Rsas, {});
		if (scheme == Scheme::Rsas) {
			// Alter the circuit body: invert the insertion wire on the block's critical minterms.
			GateBuilder alt(gates, unique_prefix(c, "alt" + std::to_string(j)));
			std::vector<std::string> det;
			for (Minterm x : spec.blocks[j])
				det.push_back(cube_detector(alt, spec.input_slice, n, x, minterm_mask(n), "d"));
			outs.push_back(alt.or_of(det, "inv", unique_prefix(c, "alt" + std::to_string(j)) + "out"));
		}
		outs.push_back(wires.y);
	}
	Circuit result(c.name(), std::move(inputs), c.outputs(), std::move(gates));
	std::size_t next = 0;
	for (std::size_t j = 0; j < spec.l; ++j) {
		if (scheme == Scheme::Rsas)
			result = insert_xor_at_wire(result, spec.insertion_wires[j], outs[next++]);
		result = insert_xor_at_wire(result, spec.insertion_wires[j], outs[next++]);
	}
	return LockedCircuit{std::move(result), scheme, std::move(spec), std::move(key)};
}

} // namespace

Circuit build_sas_block(const SasSpec &spec, std::size_t j, bool rsas)
{
	std::vector<std::string> x, k1, k2, inputs;
	for (unsigned p = 0; p < spec.n; ++p) {
		x.push_back("x" + std::to_string(p));
		k1.push_back("k1_" + std::to_string(p));
		k2.push_back("k2_" + std::to_string(p));
	}
	inputs = x;
	inputs.insert(inputs.end(), k1.begin(), k1.end());
	inputs.insert(inputs.end(), k2.begin(), k2.end());
	std::vector<Gate> gates;
	GateBuilder b(gates, "n_");
	emit_sas_block(b, spec, j, x, k1, k2, rsas, "y");
	return Circuit(rsas ? "rsas_block" : "sas_block", std::move(inputs), {"y"}, std::move(gates));
}

void resolve_defaults(SasSpec &spec, const Circuit &c)
{
	if (spec.input_slice.empty())
		spec.input_slice = default_slice(c, spec.n);
	if (spec.input_slice.size() != spec.n)
		throw SpecError("input slice must name exactly n inputs");
	check_slice(c, spec.input_slice);
	if (spec.insertion_wires.empty()) {
		if (c.outputs().size() < spec.l)
			throw SpecError("circuit has fewer outputs than blocks");
		spec.insertion_wires.assign(c.outputs().end() - spec.l, c.outputs().end());
	}
	std::set<std::string> seen;
	for (const auto &w : spec.insertion_wires) {
		check_wire(c, w);
		if (!seen.insert(w).second)
			throw SpecError("insertion wire '" + w + "' listed twice");
	}
}

void resolve_defaults(SfllSpec &spec, const Circuit &c)
{
	if (spec.input_slice.empty())
		spec.input_slice = default_slice(c, spec.n);
	if (spec.input_slice.size() != spec.n)
		throw SpecError("input slice must name exactly n inputs");
	check_slice(c, spec.input_slice);
	if (spec.insertion_wire.empty()) {
		if (c.outputs().empty())
			throw SpecError("circuit has no outputs");
		spec.insertion_wire = c.outputs().back();
	}
	check_wire(c, spec.insertion_wire);
}

LockedCircuit lock_sas(const Circuit &c, SasSpec spec, std::uint64_t seed)
{
	if (spec.m == 0)
		throw SpecError("SAS needs at least one critical minterm; use Anti-SAT for m = 0");
	return lock_sas_family(c, std::move(spec), seed, Scheme::Sas);
}

LockedCircuit lock_rsas(const Circuit &c, SasSpec spec, std::uint64_t seed)
{
	return lock_sas_family(c, std::move(spec), seed, Scheme::Rsas);
}

LockedCircuit lock_antisat(const Circuit &c, SasSpec spec, std::uint64_t seed)
{
	if (spec.m != 0)
		throw SpecError("an Anti-SAT spec has no critical minterms");
	return lock_sas_family(c, std::move(spec), seed, Scheme::AntiSat);
}

LockedCircuit lock_antisat(const Circuit &c, unsigned n, Minterm x_g, const std::string &insertion_wire,
	std::uint64_t seed, std::vector<std::string> input_slice)
{
	return lock_antisat(c, make_antisat_spec(n, x_g, insertion_wire, std::move(input_slice)), seed);
}

LockedCircuit lock_sfll_flex(const Circuit &c, SfllSpec spec, std::uint64_t seed)
{
	(void)seed; // the key is the protected cube set; nothing is drawn
	resolve_defaults(spec, c);
	spec.validate();
	const unsigned n = spec.n;
	std::vector<std::string> inputs = c.inputs();
	std::vector<Gate> gates = c.gates();
	auto keys = add_key_inputs(c, inputs, spec.key_bits());

	GateBuilder fsc(gates, unique_prefix(c, "fsc"));
	std::vector<std::string> strip_terms;
	for (const Cube &cube : spec.cubes)
		strip_terms.push_back(cube_detector(fsc, spec.input_slice, n, cube.value, cube.care, "d"));
	std::string strip = fsc.or_of(strip_terms, "strip", unique_prefix(c, "fsc") + "out");

	GateBuilder ru(gates, unique_prefix(c, "ru"));
	BitVector key(spec.key_bits());
	std::vector<std::string> match_terms;
	for (std::size_t i = 0; i < spec.cubes.size(); ++i) {
		std::vector<std::string> eq;
		std::size_t t = 0;
		for (unsigned p = 0; p < n; ++p) {
			if (!minterm_bit(spec.cubes[i].care, n, p))
				continue;
			std::size_t bit = i * spec.k + t++;
			key.set(bit, minterm_bit(spec.cubes[i].value, n, p));
			eq.push_back(ru.add(GateKind::Xnor, {spec.input_slice[p], keys[bit]}, "eq"));
		}
		match_terms.push_back(ru.and_of(std::move(eq), "match"));
	}
	std::string restore = ru.or_of(match_terms, "restore", unique_prefix(c, "ru") + "out");

	Circuit result(c.name(), std::move(inputs), c.outputs(), std::move(gates));
	result = insert_xor_at_wire(result, spec.insertion_wire, strip);
	result = insert_xor_at_wire(result, spec.insertion_wire, restore);
	return LockedCircuit{std::move(result), Scheme::SfllFlex, std::move(spec), std::move(key)};
}

} // namespace saslab
