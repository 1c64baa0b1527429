#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace saslab {

/// An n-bit input-slice value (n <= 32). Slice position 0 is the most
/// significant bit, so position i maps to integer bit (n - 1 - i).
using Minterm = std::uint64_t;

inline bool minterm_bit(Minterm value, unsigned width, unsigned position)
{
	return (value >> (width - 1 - position)) & 1u;
}

inline Minterm minterm_mask(unsigned width)
{
	return width >= 64 ? ~Minterm{0} : ((Minterm{1} << width) - 1);
}

/// Fixed-width hex, ceil(width / 4) digits, value right-aligned.
std::string minterm_to_hex(Minterm value, unsigned width);
Minterm minterm_from_hex(std::string_view hex, unsigned width);

/// Ordered bit vector; bit 0 is the most significant when rendered as hex.
class BitVector {
public:
	BitVector() = default;
	explicit BitVector(std::size_t size, bool value = false) : bits_(size, value ? 1 : 0) {}

	static BitVector from_uint(std::uint64_t value, std::size_t width);
	static BitVector from_hex(std::string_view hex, std::size_t width);
	/// Width inferred as 4 * digit count.
	static BitVector from_hex(std::string_view hex);

	std::size_t size() const { return bits_.size(); }
	bool empty() const { return bits_.empty(); }
	bool operator[](std::size_t i) const { return bits_[i] != 0; }
	void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
	void push_back(bool v) { bits_.push_back(v ? 1 : 0); }

	/// Reads `width` bits starting at `offset` as an MSB-first integer.
	std::uint64_t slice(std::size_t offset, std::size_t width) const;
	void assign_slice(std::size_t offset, std::size_t width, std::uint64_t value);
	BitVector concat(const BitVector &other) const;

	std::string to_hex() const;
	std::string to_string() const;

	friend bool operator==(const BitVector &, const BitVector &) = default;
	friend auto operator<=>(const BitVector &, const BitVector &) = default;

private:
	std::vector<std::uint8_t> bits_;
};

/// Seeded generator with a platform-independent bounded draw, so that every
/// seeded construction reproduces across standard libraries.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next() { return engine_(); }
	/// Uniform in [0, bound).
	std::uint64_t below(std::uint64_t bound);
	bool coin() { return next() >> 63; }
	double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

	template <typename T>
	void shuffle(std::vector<T> &items)
	{
		for (std::size_t i = items.size(); i > 1; --i) {
			std::size_t j = below(i);
			std::swap(items[i - 1], items[j]);
		}
	}

private:
	std::mt19937_64 engine_;
};

/// Derives an independent stream seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

bool is_power_of_two(std::uint64_t v);
unsigned log2_exact(std::uint64_t v);

} // namespace saslab
