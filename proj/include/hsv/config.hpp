#pragma once

// Job configuration files: "[section]" headers followed by "key = value"
// lines. Lines starting with ';' or '#' are comments. Every accessor records
// the keys it reads so that leftover (misspelled) keys can be rejected.

#include "hsv/interval.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsv {

struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
    /// 1-based column of the key and of the first value character.
    std::size_t key_column = 1;
    std::size_t value_column = 1;
    mutable bool used = false;
};

struct ConfigSection {
    std::string name;
    std::size_t line = 0;
    std::vector<ConfigEntry> entries;

    [[nodiscard]] const ConfigEntry* find(std::string_view key) const;
};

class Config {
public:
    /// Throws ParseError("<source>:<line>:<column>: ...").
    static Config parse(std::string_view text, std::string source = "<config>");
    static Config load(const std::string& path);

    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] const std::vector<ConfigSection>& sections() const noexcept { return sections_; }

    [[nodiscard]] const ConfigSection* section(std::string_view name) const;
    /// Sections named "<prefix>.<something>", in file order.
    [[nodiscard]] std::vector<const ConfigSection*> sections_with_prefix(std::string_view prefix) const;

    [[nodiscard]] const ConfigEntry* entry(std::string_view section, std::string_view key) const;
    [[nodiscard]] bool has(std::string_view section, std::string_view key) const;

    [[nodiscard]] std::string text_value(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<std::string> text_value_opt(std::string_view section,
                                                            std::string_view key) const;
    /// Round-to-nearest value of a decimal or p/q literal.
    [[nodiscard]] std::optional<double> real(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<std::uint64_t> integer(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<bool> boolean(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<Box> box(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<Interval> interval(std::string_view section, std::string_view key) const;
    /// Whitespace separated tokens.
    [[nodiscard]] std::vector<std::string> list(std::string_view section, std::string_view key) const;

    /// Throws ParseError pointing at the entry's value.
    [[noreturn]] void fail(const ConfigEntry& e, const std::string& message) const;
    [[noreturn]] void fail(std::string_view section, const std::string& message) const;

    /// Throws ParseError for the first entry no accessor has read.
    void reject_unused() const;

private:
    std::string source_;
    std::string text_;
    std::vector<ConfigSection> sections_;
};

/// Parses "[a, b] x [c, d] x ..." ('x' or the multiplication sign) with
/// round-to-nearest endpoints. Throws ParseError naming the column.
Box parse_box_literal(std::string_view text);
/// Round-to-nearest value of a decimal or p/q literal.
double parse_real_literal(std::string_view text);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);

} // namespace hsv
