#pragma once

// Flat `key = value` text files (calendar, generator specs).

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace hfmargin::detail {

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

[[nodiscard]] std::string_view trim(std::string_view s) noexcept;

/// Blank lines and `#` / `;` comments are skipped; `[section]` headers are ignored.
[[nodiscard]] std::vector<KeyValue> parse_key_values(std::istream& in);

/// Splits on commas and whitespace, dropping empty items.
[[nodiscard]] std::vector<std::string> split_list(std::string_view s);

}  // namespace hfmargin::detail
