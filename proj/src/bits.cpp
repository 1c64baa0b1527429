#include "saslab/bits.hpp"

#include "saslab/errors.hpp"

#include <cctype>

namespace saslab {

namespace {

int hex_digit(char ch)
{
	if (ch >= '0' && ch <= '9')
		return ch - '0';
	ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
	if (ch >= 'a' && ch <= 'f')
		return ch - 'a' + 10;
	return -1;
}

std::string_view strip_prefix(std::string_view hex)
{
	if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X'))
		hex.remove_prefix(2);
	return hex;
}

} // namespace

std::string minterm_to_hex(Minterm value, unsigned width)
{
	static const char digits[] = "0123456789abcdef";
	unsigned ndigits = (width + 3) / 4;
	std::string out(ndigits == 0 ? 1 : ndigits, '0');
	for (std::size_t i = 0; i < out.size(); ++i)
		out[out.size() - 1 - i] = digits[(value >> (4 * i)) & 0xf];
	return out;
}

Minterm minterm_from_hex(std::string_view hex, unsigned width)
{
	hex = strip_prefix(hex);
	if (hex.empty())
		throw ParseError("empty hex value");
	Minterm value = 0;
	for (char ch : hex) {
		int d = hex_digit(ch);
		if (d < 0)
			throw ParseError("invalid hex digit in '" + std::string(hex) + "'");
		if (value >> 60)
			throw ParseError("hex value '" + std::string(hex) + "' exceeds 64 bits");
		value = (value << 4) | static_cast<Minterm>(d);
	}
	if (width < 64 && (value >> width) != 0)
		throw ParseError("hex value '" + std::string(hex) + "' exceeds " + std::to_string(width) + " bits");
	return value;
}

BitVector BitVector::from_uint(std::uint64_t value, std::size_t width)
{
	BitVector bv(width);
	bv.assign_slice(0, width, value);
	return bv;
}

BitVector BitVector::from_hex(std::string_view hex, std::size_t width)
{
	hex = strip_prefix(hex);
	BitVector digits = from_hex(hex);
	if (digits.size() < width) {
		BitVector padded(width - digits.size());
		return padded.concat(digits);
	}
	std::size_t extra = digits.size() - width;
	for (std::size_t i = 0; i < extra; ++i)
		if (digits[i])
			throw ParseError("hex value '" + std::string(hex) + "' exceeds " + std::to_string(width) + " bits");
	BitVector out(width);
	for (std::size_t i = 0; i < width; ++i)
		out.set(i, digits[extra + i]);
	return out;
}

BitVector BitVector::from_hex(std::string_view hex)
{
	hex = strip_prefix(hex);
	BitVector out;
	for (char ch : hex) {
		if (std::isspace(static_cast<unsigned char>(ch)))
			continue;
		int d = hex_digit(ch);
		if (d < 0)
			throw ParseError("invalid hex digit in '" + std::string(hex) + "'");
		for (int b = 3; b >= 0; --b)
			out.push_back((d >> b) & 1);
	}
	return out;
}

std::uint64_t BitVector::slice(std::size_t offset, std::size_t width) const
{
	std::uint64_t v = 0;
	for (std::size_t i = 0; i < width; ++i)
		v = (v << 1) | bits_.at(offset + i);
	return v;
}

void BitVector::assign_slice(std::size_t offset, std::size_t width, std::uint64_t value)
{
	for (std::size_t i = 0; i < width; ++i)
		bits_.at(offset + i) = (value >> (width - 1 - i)) & 1u;
}

BitVector BitVector::concat(const BitVector &other) const
{
	BitVector out = *this;
	out.bits_.insert(out.bits_.end(), other.bits_.begin(), other.bits_.end());
	return out;
}

std::string BitVector::to_hex() const
{
	static const char digits[] = "0123456789abcdef";
	std::size_t ndigits = (bits_.size() + 3) / 4;
	if (ndigits == 0)
		return "0";
	std::size_t pad = ndigits * 4 - bits_.size();
	std::string out;
	out.reserve(ndigits);
	unsigned acc = 0;
	std::size_t count = pad;
	for (std::uint8_t b : bits_) {
		acc = (acc << 1) | b;
		if (++count == 4) {
			out.push_back(digits[acc]);
			acc = 0;
			count = 0;
		}
	}
	return out;
}

std::string BitVector::to_string() const
{
	std::string out;
	out.reserve(bits_.size());
	for (std::uint8_t b : bits_)
		out.push_back(b ? '1' : '0');
	return out;
}

std::uint64_t Rng::below(std::uint64_t bound)
{
	if (bound <= 1)
		return 0;
	// Rejection sampling on the top of the range.
	std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
	std::uint64_t x;
	do {
		x = next();
	} while (x >= limit);
	return x % bound;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
	std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

bool is_power_of_two(std::uint64_t v)
{
	return v != 0 && (v & (v - 1)) == 0;
}

unsigned log2_exact(std::uint64_t v)
{
	unsigned r = 0;
	while (v > 1) {
		v >>= 1;
		++r;
	}
	return r;
}

} // namespace saslab
