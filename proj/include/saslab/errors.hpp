#pragma once

#include <stdexcept>
#include <string>

namespace saslab {

/// Malformed input text: BENCH, hex, JSON, trace CSV, unreadable files.
class ParseError : public std::runtime_error {
public:
	explicit ParseError(const std::string &what, int line = 0)
	    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
	{
	}
	int line() const { return line_; }

private:
	int line_;
};

/// Structurally invalid circuit or illegal transformation.
class NetlistError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Invalid or infeasible locking/metric parameters.
class SpecError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// A computation exceeds its configured size limit.
class LimitError : public SpecError {
public:
	using SpecError::SpecError;
};

/// The satisfiability engine failed to produce a verdict.
class EngineError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

} // namespace saslab
