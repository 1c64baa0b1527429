#pragma once

#include "saslab/bits.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace saslab {

enum class GateKind : std::uint8_t { And, Or, Nand, Nor, Xor, Xnor, Not, Buf };

std::string_view to_string(GateKind kind);
/// Case-insensitive.
std::optional<GateKind> parse_gate_kind(std::string_view text);

struct Gate {
	std::string output;
	GateKind kind;
	std::vector<std::string> inputs;

	friend bool operator==(const Gate &, const Gate &) = default;
};

/// Wire name to bit.
using Assignment = std::map<std::string, bool>;

/**
 * Immutable combinational gate-level netlist.
 *
 * Gates are kept in a topological order: the declaration order when it is
 * already topological, otherwise the stable order that keeps earlier
 * declarations first. Outputs that name a primary input directly are given a
 * BUF gate so that every output is driven by a gate.
 *
 * Constants are expressed with the reserved pseudo-input `__zero`, which always
 * carries 0. It never appears in inputs() and is not part of the functional
 * interface; BENCH text declares it with `INPUT(__zero)`.
 */
class Circuit {
public:
	using WireId = std::uint32_t;
	static constexpr std::string_view kZeroWire = "__zero";

	Circuit() = default;
	Circuit(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
		std::vector<Gate> gates);

	const std::string &name() const { return name_; }
	const std::vector<std::string> &inputs() const { return inputs_; }
	const std::vector<std::string> &outputs() const { return outputs_; }
	const std::vector<Gate> &gates() const { return gates_; }
	bool uses_zero() const { return uses_zero_; }

	// Compiled view. Wire ids: inputs, then the zero wire, then gate outputs.
	std::size_t wire_count() const { return inputs_.size() + 1 + gates_.size(); }
	WireId zero_wire() const { return static_cast<WireId>(inputs_.size()); }
	WireId gate_wire(std::size_t gate) const { return static_cast<WireId>(inputs_.size() + 1 + gate); }
	std::optional<WireId> find_wire(std::string_view name) const;
	bool has_wire(std::string_view name) const { return find_wire(name).has_value(); }
	const std::string &wire_name(WireId id) const;
	bool is_input_wire(WireId id) const { return id < inputs_.size(); }
	/// Index of the gate driving the wire, if any.
	std::optional<std::size_t> driver(WireId id) const;
	std::span<const WireId> gate_fanin(std::size_t gate) const
	{
		return {fanin_.data() + fanin_offset_[gate], fanin_offset_[gate + 1] - fanin_offset_[gate]};
	}
	const std::vector<WireId> &output_wires() const { return output_ids_; }
	/// Consumer gate indices per wire.
	std::vector<std::vector<std::size_t>> fanouts() const;
	/// Marks every wire in the transitive fan-out of the given wires.
	std::vector<bool> transitive_fanout(std::span<const WireId> roots) const;
	/// Marks every wire in the transitive fan-in of the given wires.
	std::vector<bool> transitive_fanin(std::span<const WireId> roots) const;

	friend bool operator==(const Circuit &a, const Circuit &b)
	{
		return a.name_ == b.name_ && a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ && a.gates_ == b.gates_;
	}

private:
	std::string name_;
	std::vector<std::string> inputs_;
	std::vector<std::string> outputs_;
	std::vector<Gate> gates_;
	bool uses_zero_ = false;

	std::unordered_map<std::string, WireId> index_;
	std::vector<WireId> output_ids_;
	std::vector<WireId> fanin_;
	std::vector<std::size_t> fanin_offset_{0};
};

bool is_valid_wire_name(std::string_view name);
/// `base` if unused in `c`, otherwise `base_<i>` for the smallest free i.
std::string fresh_wire_name(const Circuit &c, std::string_view base);

Circuit parse_bench(std::string_view text, std::string name = "circuit");
Circuit read_bench_file(const std::string &path);
std::string emit_bench(const Circuit &c);

/// Outputs of the circuit for one assignment of all primary inputs.
Assignment simulate(const Circuit &c, const Assignment &inputs);
std::vector<Assignment> simulate_batch(const Circuit &c, const std::vector<Assignment> &inputs);
/// Positional variant: bits follow c.inputs(), result follows c.outputs().
BitVector evaluate(const Circuit &c, const BitVector &inputs);

/// Bit-parallel evaluator: 64 input patterns per machine word.
class PackedSimulator {
public:
	explicit PackedSimulator(const Circuit &c);

	/// `inputs` follows circuit.inputs(); `outputs` follows circuit.outputs().
	void run(std::span<const std::uint64_t> inputs, std::span<std::uint64_t> outputs);
	/// Values of every wire after the last run().
	std::span<const std::uint64_t> wire_values() const { return values_; }

private:
	const Circuit *circuit_;
	std::vector<std::uint64_t> values_;
};

/**
 * Routes every former consumer of `wire` (including output references) through
 * XOR(wire, signal). A gate-driven wire keeps its name: the driver is renamed
 * and the XOR takes over the original name. If `signal` is not a wire of `c`
 * it is appended as a new primary input.
 */
Circuit insert_xor_at_wire(const Circuit &c, const std::string &wire, const std::string &signal);

/// Replaces the listed primary inputs with constants.
Circuit bind_inputs(const Circuit &c, const Assignment &values);
/// Replaces the driver of `wire` with a constant-0 buffer.
Circuit tie_to_zero(const Circuit &c, const std::string &wire);
/// Folds constants through gates; wire names of surviving gates are kept.
Circuit propagate_constants(const Circuit &c);
/// Drops gates outside the output cone and inputs selected by `drop_if_unused`
/// that no longer have any consumer.
Circuit remove_dead_logic(const Circuit &c, const std::function<bool(const std::string &)> &drop_if_unused);

/// One-output circuit that is 1 iff the outputs of c1 and c2 differ.
Circuit build_miter(const Circuit &c1, const Circuit &c2);

enum class EquivalenceMode { Exhaustive, Sat };

struct EquivalenceResult {
	bool equal = true;
	/// Distinguishing input when !equal.
	Assignment counterexample;
};

inline constexpr unsigned kDefaultExhaustiveWidth = 20;

EquivalenceResult check_equivalence(const Circuit &c1, const Circuit &c2, EquivalenceMode mode,
	unsigned width_limit = kDefaultExhaustiveWidth);

/**
 * Probability of each wire being 1 under the input-independence approximation.
 * Inputs missing from `input_probs` default to 0.5. Multi-input gates fold
 * left-associatively. Skew of a wire is (p - 0.5).
 */
std::map<std::string, double> signal_probabilities(const Circuit &c,
	const std::map<std::string, double> &input_probs = {});

} // namespace saslab
