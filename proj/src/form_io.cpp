#include "bqc/form_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace bqc {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& what) {
    throw SchemaError(source + ": " + what);
}

Integer to_integer(const json& v, const std::string& source, const std::string& field) {
    if (v.is_number_integer()) return v.is_number_unsigned() ? Integer(v.get<std::uint64_t>()) : Integer(v.get<i64>());
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        const std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (start == s.size() || s.find_first_not_of("0123456789", start) != std::string::npos)
            fail(source, "field " + field + ": \"" + s + "\" is not an integer");
        return Integer(s);
    }
    fail(source, "field " + field + ": expected an integer");
}

const json& require(const json& obj, const char* key, const std::string& source, const std::string& where) {
    if (!obj.contains(key)) fail(source, where + ": missing field \"" + key + "\"");
    return obj.at(key);
}

std::size_t read_n(const json& doc, const std::string& source) {
    const json& n = require(doc, "n", source, "form");
    if (!n.is_number_integer() || n.get<i64>() < 2) fail(source, "field n: expected an integer >= 2");
    return static_cast<std::size_t>(n.get<i64>());
}

QuadraticForm parse_quadratic(const json& doc, const std::string& source) {
    const std::size_t n = read_n(doc, source);
    const json& gram = require(doc, "gram", source, "quadratic form");
    if (!gram.is_array() || gram.size() != n) fail(source, "field gram: expected " + std::to_string(n) + " rows");
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row_name = "gram[" + std::to_string(i + 1) + "]";
        if (!gram[i].is_array() || gram[i].size() != n)
            fail(source, "field " + row_name + ": expected " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = to_integer(gram[i][j], source, row_name + "[" + std::to_string(j + 1) + "]");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (m(i, j) != m(j, i))
                fail(source, "field gram: not symmetric at entry (" + std::to_string(i + 1) + "," +
                                 std::to_string(j + 1) + "): " + to_string(m(i, j)) + " != " + to_string(m(j, i)));
    return QuadraticForm(std::move(m));
}

BiquadraticForm parse_biquadratic(const json& doc, const std::string& source) {
    const std::size_t n = read_n(doc, source);
    const json& coeffs = require(doc, "coeffs", source, "biquadratic form");
    if (!coeffs.is_array()) fail(source, "field coeffs: expected an array");
    BiquadraticForm b(n);
    std::set<BiIndex> seen;
    for (std::size_t t = 0; t < coeffs.size(); ++t) {
        const std::string where = "coeffs[" + std::to_string(t + 1) + "]";
        const json& e = coeffs[t];
        if (!e.is_object()) fail(source, where + ": expected an object");
        int idx[4];
        const char* keys[4] = {"i", "j", "k", "l"};
        for (int a = 0; a < 4; ++a) {
            const json& v = require(e, keys[a], source, where);
            if (!v.is_number_integer()) fail(source, where + "." + keys[a] + ": expected an integer");
            const i64 value = v.get<i64>();
            if (value < 1 || value > static_cast<i64>(n))
                fail(source, where + "." + keys[a] + ": index " + std::to_string(value) + " outside 1.." +
                                 std::to_string(n));
            idx[a] = static_cast<int>(value - 1);
        }
        if (idx[0] > idx[1]) fail(source, where + ": i > j (indices must satisfy i <= j)");
        if (idx[2] > idx[3]) fail(source, where + ": k > l (indices must satisfy k <= l)");
        if (!seen.insert({idx[0], idx[1], idx[2], idx[3]}).second) fail(source, where + ": duplicate monomial");
        b.add_term(idx[0], idx[1], idx[2], idx[3], to_integer(require(e, "c", source, where), source, where + ".c"));
    }
    return b;
}

json integer_json(const Integer& v) {
    if (v >= std::numeric_limits<i64>::min() && v <= std::numeric_limits<i64>::max()) return static_cast<i64>(v);
    return to_string(v);
}

}  // namespace

AnyForm parse_form(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        fail(source, "line " + std::to_string(line) + ": JSON syntax error (" + e.what() + ")");
    }
    if (!doc.is_object()) fail(source, "top level must be an object");
    const json& kind = require(doc, "kind", source, "form");
    if (!kind.is_string()) fail(source, "field kind: expected a string");
    const auto k = kind.get<std::string>();
    if (k == "quadratic") return parse_quadratic(doc, source);
    if (k == "biquadratic") return parse_biquadratic(doc, source);
    fail(source, "field kind: unknown kind \"" + k + "\"");
}

AnyForm load_form(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_form(ss.str(), path.string());
}

std::string form_to_json(const QuadraticForm& f) {
    const std::size_t n = f.dim();
    json gram = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) row.push_back(integer_json(f.gram()(i, j)));
        gram.push_back(row);
    }
    json doc = {{"kind", "quadratic"}, {"n", n}, {"gram", gram}};
    return doc.dump(2);
}

std::string form_to_json(const BiquadraticForm& b) {
    json coeffs = json::array();
    for (const auto& [idx, c] : b.coeffs())
        coeffs.push_back({{"i", idx[0] + 1}, {"j", idx[1] + 1}, {"k", idx[2] + 1}, {"l", idx[3] + 1}, {"c", integer_json(c)}});
    json doc = {{"kind", "biquadratic"}, {"n", b.dim()}, {"coeffs", coeffs}};
    return doc.dump(2);
}

void save_form(const std::filesystem::path& path, const AnyForm& form) {
    std::ofstream out(path);
    if (!out) throw Error(path.string() + ": cannot write file");
    std::visit([&](const auto& f) { out << form_to_json(f) << '\n'; }, form);
}

}  // namespace bqc
