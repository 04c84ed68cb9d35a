#include "kv.hpp"

#include "hfmargin/error.hpp"

namespace hfmargin::detail {

std::string_view trim(std::string_view s) noexcept {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<KeyValue> parse_key_values(std::istream& in) {
    std::vector<KeyValue> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find_first_of("#;"); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty() || view.front() == '[') continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
        KeyValue kv;
        kv.key = std::string(trim(view.substr(0, eq)));
        kv.value = std::string(trim(view.substr(eq + 1)));
        kv.line = lineno;
        if (kv.key.empty()) throw ParseError(lineno, "empty key");
        if (kv.value.size() >= 2 && kv.value.front() == '"' && kv.value.back() == '"') {
            kv.value = kv.value.substr(1, kv.value.size() - 2);
        }
        out.push_back(std::move(kv));
    }
    return out;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t' || c == '[' || c == ']' || c == '"') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace hfmargin::detail
