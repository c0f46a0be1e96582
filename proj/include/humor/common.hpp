#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace humor {

// Input file could not be parsed at all (bad JSON, wrong types, unknown enum tag).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// One broken invariant, naming the offending record.
struct Violation {
    std::string rule;
    std::string detail;
};

// Structurally parseable input that breaks dataset invariants.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : std::runtime_error(format(violations)), violations_(std::move(violations)) {}
    explicit ValidationError(const std::string& msg)
        : std::runtime_error(msg), violations_{{"validation", msg}} {}
    ValidationError(const std::string& rule, const std::string& detail)
        : std::runtime_error(rule + ": " + detail), violations_{{rule, detail}} {}

    const std::vector<Violation>& violations() const { return violations_; }

private:
    static std::string format(const std::vector<Violation>& vs) {
        if (vs.empty()) return "validation failed";
        std::string out = vs.front().rule + ": " + vs.front().detail;
        if (vs.size() > 1) out += " (+" + std::to_string(vs.size() - 1) + " more)";
        return out;
    }
    std::vector<Violation> violations_;
};

// Optimization blew up; carries the iteration and step size where it happened.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& msg, int iteration, double eta)
        : std::runtime_error(msg + " (iteration " + std::to_string(iteration) +
                             ", eta " + std::to_string(eta) + ")"),
          iteration_(iteration), eta_(eta) {}

    int iteration() const { return iteration_; }
    double eta() const { return eta_; }

private:
    int iteration_;
    double eta_;
};

// Deterministic RNG. Wraps a fixed 64-bit engine and derives doubles/ints
// from raw draws only, so sequences are identical across platforms
// (std::uniform_*_distribution is implementation-defined and avoided).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0, 1), 53 bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), rejection sampled
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

    bool coin(double p = 0.5) { return uniform() < p; }

    // derive an independent child seed
    std::uint64_t fork() { return next(); }

private:
    std::uint64_t state_;
};

} // namespace humor
