#pragma once

// Scenario files: flat `key = value` documents, one key per line, `#`
// comments. Numeric values accept SI-prefixed units (0.5nW, 2mW, 1.3MHz,
// 1064nm, 1ms). Values are stored in canonical form so that a dumped file
// re-parses to the identical scenario and digest.

#include "hetnoise/simulate.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hetnoise {

enum class ValueKind { Power, Length, Frequency, Time, Angle, AngularRate, Density, Real, Integer, Seed, Flag, Choice };

struct KeySpec {
    std::string name;
    ValueKind kind;
    std::string default_value;
    std::vector<std::string> choices; ///< for ValueKind::Choice
    std::string doc;
};

/// Every recognized scenario key, in canonical order.
const std::vector<KeySpec>& scenario_keys();

/// Parses a number with an optional SI-prefixed unit matching `kind`.
/// Throws config_error naming `key` on malformed input.
double parse_quantity(const std::string& key, const std::string& text, ValueKind kind);

class ScenarioParams {
public:
    /// All keys at their defaults.
    ScenarioParams();

    /// Sets a key from user text. Throws config_error naming the key when
    /// the key is unknown or the value does not parse.
    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;

    /// Keys set since construction, in the order they were last written.
    const std::vector<std::string>& overridden() const { return overridden_; }

    /// Parses a document on top of the current values.
    void merge_text(const std::string& text);
    void merge_file(const std::string& path);

    /// Canonical `key = value` document for every key.
    std::string dump() const;

    /// Builds and validates the typed scenario.
    Scenario build() const;

    bool operator==(const ScenarioParams& o) const { return values_ == o.values_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> overridden_;
};

/// Canonical text of every field of a typed scenario.
std::string canonical_text(const Scenario& sc);

/// Short hex SHA-256 of canonical_text().
std::string scenario_digest(const Scenario& sc);

/// Header lines shared by every artifact: tool version, digest, seed.
std::vector<std::string> artifact_header(const Scenario& sc, const std::vector<std::string>& overrides = {});

// Trace files. Binary: ASCII `key=value` header lines, a blank line, then
// little-endian float64 samples. CSV: `# key=value` lines, then t_s,current_a.
void write_trace_binary(std::ostream& os, const PhotocurrentTrace& tr, const std::vector<std::string>& header);
PhotocurrentTrace read_trace_binary(std::istream& is);
void write_trace_csv(std::ostream& os, const PhotocurrentTrace& tr, const std::vector<std::string>& header);

std::string tool_version();

} // namespace hetnoise
