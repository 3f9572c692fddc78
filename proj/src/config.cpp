#include "hsv/config.hpp"

#include "hsv/errors.hpp"
#include "hsv/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hsv {

namespace {

bool is_key_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

std::string_view trim_view(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string location(const std::string& source, std::size_t line, std::size_t column)
{
    return source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
}

} // namespace

const ConfigEntry* ConfigSection::find(std::string_view key) const
{
    for (const auto& e : entries) {
        if (e.key == key) {
            return &e;
        }
    }
    return nullptr;
}

Config Config::parse(std::string_view text, std::string source)
{
    Config cfg;
    cfg.source_ = std::move(source);
    cfg.text_ = std::string(text);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;

        const auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || raw[first] == ';' || raw[first] == '#') {
            continue;
        }
        const std::string_view line = trim_view(raw);
        const std::size_t col = first + 1;
        auto fail_here = [&](std::size_t column, const std::string& msg) {
            throw ParseError(location(cfg.source_, line_no, column) + msg);
        };

        if (line.front() == '[') {
            if (line.back() != ']') {
                fail_here(col + line.size(), "expected ']' to close the section header");
            }
            const std::string_view name = trim_view(line.substr(1, line.size() - 2));
            if (name.empty()) {
                fail_here(col + 1, "empty section name");
            }
            for (std::size_t i = 0; i < name.size(); ++i) {
                if (!is_key_char(name[i])) {
                    fail_here(col + 1 + i,
                              "invalid character '" + std::string(1, name[i]) + "' in section name");
                }
            }
            if (cfg.section(name) != nullptr) {
                fail_here(col, "duplicate section [" + std::string(name) + "]");
            }
            cfg.sections_.push_back({std::string(name), line_no, {}});
            continue;
        }

        const auto eq = line.find('=');
        const std::string_view key =
            trim_view(line.substr(0, eq == std::string_view::npos ? line.size() : eq));
        if (eq == std::string_view::npos) {
            fail_here(col, "key '" + std::string(key) + "': expected 'key = value'");
        }
        if (key.empty()) {
            fail_here(col, "missing key before '='");
        }
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (!is_key_char(key[i])) {
                fail_here(col + i, "key '" + std::string(key) + "': invalid character '" +
                                       std::string(1, key[i]) + "'");
            }
        }
        if (cfg.sections_.empty()) {
            fail_here(col, "key '" + std::string(key) + "' appears before any [section]");
        }
        auto& sec = cfg.sections_.back();
        if (sec.find(key) != nullptr) {
            fail_here(col, "key '" + std::string(key) + "' repeated in [" + sec.name + "]");
        }
        const std::string_view after = line.substr(eq + 1);
        const auto value_offset = after.find_first_not_of(" \t");
        const std::string_view value = trim_view(after);
        ConfigEntry e;
        e.key = std::string(key);
        e.value = std::string(value);
        e.line = line_no;
        e.key_column = col;
        e.value_column = col + eq + 1 + (value_offset == std::string_view::npos ? 0 : value_offset);
        sec.entries.push_back(std::move(e));
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path + ": cannot open config file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const ConfigSection* Config::section(std::string_view name) const
{
    for (const auto& s : sections_) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

std::vector<const ConfigSection*> Config::sections_with_prefix(std::string_view prefix) const
{
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections_) {
        if (s.name.size() > prefix.size() + 1 && s.name.compare(0, prefix.size(), prefix) == 0 &&
            s.name[prefix.size()] == '.') {
            out.push_back(&s);
        }
    }
    return out;
}

const ConfigEntry* Config::entry(std::string_view section, std::string_view key) const
{
    const auto* s = this->section(section);
    const auto* e = s ? s->find(key) : nullptr;
    if (e) {
        e->used = true;
    }
    return e;
}

bool Config::has(std::string_view section, std::string_view key) const
{
    const auto* s = this->section(section);
    return s && s->find(key);
}

std::string Config::text_value(std::string_view section, std::string_view key) const
{
    if (auto v = text_value_opt(section, key)) {
        return *v;
    }
    fail(section, "missing required key '" + std::string(key) + "'");
}

std::optional<std::string> Config::text_value_opt(std::string_view section, std::string_view key) const
{
    if (const auto* e = entry(section, key)) {
        if (e->value.empty()) {
            fail(*e, "empty value");
        }
        return e->value;
    }
    return std::nullopt;
}

std::optional<double> Config::real(std::string_view section, std::string_view key) const
{
    const auto* e = entry(section, key);
    if (!e) {
        return std::nullopt;
    }
    try {
        return parse_real_literal(e->value);
    } catch (const ParseError& err) {
        fail(*e, err.what());
    }
}

std::optional<std::uint64_t> Config::integer(std::string_view section, std::string_view key) const
{
    const auto* e = entry(section, key);
    if (!e) {
        return std::nullopt;
    }
    std::uint64_t v = 0;
    const auto* end = e->value.data() + e->value.size();
    const auto [p, ec] = std::from_chars(e->value.data(), end, v);
    if (ec != std::errc{} || p != end) {
        fail(*e, "expected a non-negative integer, got '" + e->value + "'");
    }
    return v;
}

std::optional<bool> Config::boolean(std::string_view section, std::string_view key) const
{
    const auto* e = entry(section, key);
    if (!e) {
        return std::nullopt;
    }
    if (e->value == "true" || e->value == "1" || e->value == "yes" || e->value == "on") {
        return true;
    }
    if (e->value == "false" || e->value == "0" || e->value == "no" || e->value == "off") {
        return false;
    }
    fail(*e, "expected true or false, got '" + e->value + "'");
}

std::optional<Box> Config::box(std::string_view section, std::string_view key) const
{
    const auto* e = entry(section, key);
    if (!e) {
        return std::nullopt;
    }
    try {
        return parse_box_literal(e->value);
    } catch (const ParseError& err) {
        fail(*e, err.what());
    }
}

std::optional<Interval> Config::interval(std::string_view section, std::string_view key) const
{
    auto b = box(section, key);
    if (!b) {
        return std::nullopt;
    }
    if (b->dims() != 1) {
        fail(*entry(section, key), "expected a single interval [lo, hi]");
    }
    return (*b)[0];
}

std::vector<std::string> Config::list(std::string_view section, std::string_view key) const
{
    std::vector<std::string> out;
    if (const auto* e = entry(section, key)) {
        std::istringstream in(e->value);
        std::string tok;
        while (in >> tok) {
            out.push_back(tok);
        }
    }
    return out;
}

void Config::fail(const ConfigEntry& e, const std::string& message) const
{
    throw ParseError(location(source_, e.line, e.value_column) + "key '" + e.key + "': " + message);
}

void Config::fail(std::string_view section, const std::string& message) const
{
    const auto* s = this->section(section);
    const std::size_t line = s ? s->line : 0;
    throw ParseError(location(source_, line, 1) + "[" + std::string(section) + "]: " + message);
}

void Config::reject_unused() const
{
    for (const auto& s : sections_) {
        for (const auto& e : s.entries) {
            if (!e.used) {
                throw ParseError(location(source_, e.line, e.key_column) + "unknown key '" + e.key +
                                 "' in [" + s.name + "]");
            }
        }
    }
}

double parse_real_literal(std::string_view text)
{
    text = trim_view(text);
    // Validates the syntax; the enclosure itself is not needed here.
    (void)parse_number(text);
    auto nearest = [](std::string_view s) {
        const std::string buf(trim_view(s));
        return std::strtod(buf.c_str(), nullptr);
    };
    bool negative = false;
    std::string_view body = text;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    double v = 0.0;
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        v = nearest(body.substr(0, slash)) / nearest(body.substr(slash + 1));
    } else {
        v = nearest(body);
    }
    return negative ? -v : v;
}

Box parse_box_literal(std::string_view text)
{
    std::vector<Interval> comps;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
    };
    auto fail_at = [&](const std::string& msg) -> void {
        throw ParseError("column " + std::to_string(i + 1) + ": " + msg);
    };
    while (true) {
        skip_ws();
        if (i >= text.size() || text[i] != '[') {
            fail_at("expected '[' to start an interval");
        }
        ++i;
        const auto comma = text.find(',', i);
        const auto close = text.find(']', i);
        if (comma == std::string_view::npos || close == std::string_view::npos || comma > close) {
            fail_at("expected '[lo, hi]'");
        }
        double lo = 0.0;
        double hi = 0.0;
        try {
            lo = parse_real_literal(text.substr(i, comma - i));
            i = comma + 1;
            hi = parse_real_literal(text.substr(i, close - i));
        } catch (const ParseError& e) {
            fail_at(e.what());
        }
        if (!(lo <= hi)) {
            fail_at("interval endpoints out of order");
        }
        comps.emplace_back(lo, hi);
        i = close + 1;
        skip_ws();
        if (i >= text.size()) {
            break;
        }
        if (text[i] == 'x' || text[i] == 'X') {
            ++i;
        } else if (text.compare(i, 2, "\xC3\x97") == 0) {
            i += 2;
        } else {
            fail_at("expected 'x' between intervals");
        }
    }
    return Box(std::move(comps));
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace hsv
