#pragma once

#include "saslab/bits.hpp"
#include "saslab/netlist.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace saslab {

enum class Scheme { Sas, Rsas, AntiSat, SfllFlex };

std::string_view to_string(Scheme scheme);
/// Accepts "sas", "rsas", "antisat", "sfll-flex" (case-insensitive).
std::optional<Scheme> parse_scheme(std::string_view text);

/// Largest slice width for which K1 partitions are materialized.
inline constexpr unsigned kMaxPartitionWidth = 20;

/// Critical minterms split into blocks, and for every critical minterm X of
/// block j the ordered set of K1 values that make block j corrupt X.
struct Partition {
	std::vector<std::vector<Minterm>> blocks;
	std::vector<std::vector<std::vector<Minterm>>> k1_sets;
};

/**
 * Builds the per-block K1 partition. Minterms are sorted and dealt to blocks
 * round-robin. Within a block each set starts with its natural key X ^ x_g;
 * the remaining values are dealt from the unclaimed K1 values in seeded
 * shuffled order, 2^n / (m / l) per set.
 */
Partition make_partition(std::vector<Minterm> critical_minterms, unsigned n, unsigned m, unsigned l, Minterm x_g,
	std::uint64_t seed);

/**
 * Parameters of a SAS/RSAS instance (and of Anti-SAT, which is the m = 0
 * case with a single pass-through block).
 */
struct SasSpec {
	unsigned n = 0;
	unsigned m = 0;
	unsigned l = 1;
	Minterm x_g = 0;
	/// Per-bit XNOR selection before g; only the all-XOR value 0 is supported.
	Minterm polarity_mask = 0;
	std::vector<std::vector<Minterm>> blocks;
	std::vector<std::vector<std::vector<Minterm>>> k1_sets;
	std::vector<std::string> insertion_wires;
	std::vector<std::string> input_slice;

	/// Validates the partition invariants and builds the lookup tables.
	/// Must be called after the fields are filled in; throws SpecError.
	void finalize();

	bool is_antisat() const { return m == 0; }
	std::vector<Minterm> critical_minterms() const;
	/// Position of X within blocks[j], or -1.
	int critical_index(std::size_t j, Minterm x) const;
	/// Index of the critical minterm of block j whose K1 set holds k1.
	int k1_owner(std::size_t j, Minterm k1) const;
	std::size_t key_bits() const { return 2u * n * l; }

private:
	std::vector<std::vector<std::int32_t>> owner_;
};

/// Builds a finalized spec from critical minterms via make_partition.
SasSpec make_sas_spec(unsigned n, std::vector<Minterm> critical_minterms, unsigned l, Minterm x_g, std::uint64_t seed,
	std::vector<std::string> insertion_wires = {}, std::vector<std::string> input_slice = {});
SasSpec make_antisat_spec(unsigned n, Minterm x_g, std::string insertion_wire = {},
	std::vector<std::string> input_slice = {});

struct Cube {
	Minterm value = 0;
	Minterm care = 0;
	bool contains(Minterm x) const { return (x & care) == value; }
	friend bool operator==(const Cube &, const Cube &) = default;
};

struct SfllSpec {
	unsigned n = 0;
	unsigned c = 0;
	unsigned k = 0;
	std::vector<Cube> cubes;
	std::string insertion_wire;
	std::vector<std::string> input_slice;

	/// Throws SpecError on malformed or overlapping cubes.
	void validate() const;
	bool protects(Minterm x) const;
	std::size_t key_bits() const { return static_cast<std::size_t>(c) * k; }
};

/// One cube per protected minterm, keeping its `k` most significant slice
/// positions as care bits.
SfllSpec make_sfll_spec(unsigned n, unsigned k, const std::vector<Minterm> &protected_minterms,
	std::string insertion_wire = {}, std::vector<std::string> input_slice = {});

/// Name of key input i.
std::string key_input_name(std::size_t index);
/// Key inputs of a circuit (`keyinput<i>`), ordered by index; throws if the
/// indices are not exactly 0..K-1.
std::vector<std::string> key_input_names(const Circuit &c);
/// Replaces key inputs with the key bits; key[i] drives keyinput<i>.
Circuit bind_key(const Circuit &locked, const BitVector &key);

struct LockedCircuit {
	Circuit circuit;
	Scheme scheme = Scheme::Sas;
	std::variant<SasSpec, SfllSpec> spec;
	BitVector correct_key;

	std::vector<std::string> key_inputs() const { return key_input_names(circuit); }
	const std::vector<std::string> &input_slice() const;
	Circuit with_key(const BitVector &key) const { return bind_key(circuit, key); }
	/// Structural characterization of functionally correct keys:
	/// K1 == K2 in every block for SAS/RSAS/Anti-SAT, the protected cube set
	/// for SFLL-flex.
	bool is_correct_key(const BitVector &key) const;
	const SasSpec &sas() const { return std::get<SasSpec>(spec); }
	const SfllSpec &sfll() const { return std::get<SfllSpec>(spec); }
};

/// Reference model of block j: H redirect, then g(X' ^ K1) & !g(X' ^ K2).
bool sas_block_output(const SasSpec &spec, std::size_t j, Minterm x, Minterm k1, Minterm k2);
/// RSAS block: the SAS output inverted on the block's critical minterms.
bool rsas_block_output(const SasSpec &spec, std::size_t j, Minterm x, Minterm k1, Minterm k2);

/// Standalone block netlist with inputs x0..x{n-1}, k1_0.., k2_0.. and output y.
Circuit build_sas_block(const SasSpec &spec, std::size_t j, bool rsas = false);

/// Fills an empty input slice (first n primary inputs) and empty insertion
/// wires (drivers of the last l primary outputs).
void resolve_defaults(SasSpec &spec, const Circuit &c);
void resolve_defaults(SfllSpec &spec, const Circuit &c);

LockedCircuit lock_sas(const Circuit &c, SasSpec spec, std::uint64_t seed);
LockedCircuit lock_rsas(const Circuit &c, SasSpec spec, std::uint64_t seed);
LockedCircuit lock_antisat(const Circuit &c, unsigned n, Minterm x_g, const std::string &insertion_wire,
	std::uint64_t seed, std::vector<std::string> input_slice = {});
LockedCircuit lock_antisat(const Circuit &c, SasSpec spec, std::uint64_t seed);
LockedCircuit lock_sfll_flex(const Circuit &c, SfllSpec spec, std::uint64_t seed);

} // namespace saslab
