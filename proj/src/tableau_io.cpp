#include "csrkn/tableau_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csrkn/error.hpp"

namespace csrkn {

namespace {

std::string scientific17(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return {buf, res.ptr};
}

std::string json_string(const std::string& s)
{
    return nlohmann::json(s).dump();
}

template <typename Vec>
void write_array(std::ostringstream& os, const Vec& v)
{
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        os << (i ? ", " : "") << scientific17(v(i));
    }
    os << ']';
}

Eigen::VectorXd read_vector(const nlohmann::json& j, const char* key, int s)
{
    const auto& arr = j.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != s) {
        throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be an array of " +
                                          std::to_string(s) + " numbers");
    }
    Eigen::VectorXd out(s);
    for (int i = 0; i < s; ++i) {
        if (!arr[i].is_number()) {
            throw Error(ErrorCode::Parse, std::string("field '") + key + "' holds a non-number");
        }
        out(i) = arr[i].get<double>();
    }
    return out;
}

} // namespace

std::string format_double(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, res.ptr};
}

std::string tableau_to_json(const RknTableau& t)
{
    t.validate();
    std::ostringstream os;
    os << "{\n";
    os << "  \"format\": " << json_string(std::string(kTableauFormat)) << ",\n";
    os << "  \"label\": " << json_string(t.label) << ",\n";
    os << "  \"s\": " << t.stages() << ",\n";
    os << "  \"c\": ";
    write_array(os, t.c);
    os << ",\n  \"a_bar\": [\n";
    for (int i = 0; i < t.stages(); ++i) {
        os << "    ";
        write_array(os, t.a_bar.row(i));
        os << (i + 1 < t.stages() ? ",\n" : "\n");
    }
    os << "  ],\n  \"b_bar\": ";
    write_array(os, t.b_bar);
    os << ",\n  \"b\": ";
    write_array(os, t.b);
    os << "\n}\n";
    return os.str();
}

RknTableau tableau_from_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("malformed tableau file: ") + e.what());
    }
    try {
        if (!j.is_object()) {
            throw Error(ErrorCode::Parse, "tableau file must hold a JSON object");
        }
        const auto format = j.at("format").get<std::string>();
        if (format != kTableauFormat) {
            throw Error(ErrorCode::Parse, "unsupported tableau format '" + format + "'");
        }
        const int s = j.at("s").get<int>();
        if (s < 1) {
            throw Error(ErrorCode::Parse, "stage count must be positive");
        }
        RknTableau t;
        t.label = j.value("label", std::string{});
        t.c = read_vector(j, "c", s);
        t.b_bar = read_vector(j, "b_bar", s);
        t.b = read_vector(j, "b", s);
        const auto& rows = j.at("a_bar");
        if (!rows.is_array() || static_cast<int>(rows.size()) != s) {
            throw Error(ErrorCode::Parse, "field 'a_bar' must hold " + std::to_string(s) + " rows");
        }
        t.a_bar.resize(s, s);
        for (int i = 0; i < s; ++i) {
            nlohmann::json row_holder{{"row", rows[i]}};
            t.a_bar.row(i) = read_vector(row_holder, "row", s).transpose();
        }
        try {
            t.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, e.what());
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("invalid tableau file: ") + e.what());
    }
}

void save_tableau(const RknTableau& t, const std::filesystem::path& path)
{
    const std::string text = tableau_to_json(t);
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
    }
}

RknTableau load_tableau(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return tableau_from_json(buf.str());
}

} // namespace csrkn
