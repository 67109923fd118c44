#include "qlr/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace qlr {

LawResult& LawReport::add(std::string law) {
    LawResult r;
    r.law = std::move(law);
    results.push_back(std::move(r));
    return results.back();
}

const LawResult* LawReport::find(const std::string& law) const {
    for (const auto& r : results)
        if (r.law == law) return &r;
    return nullptr;
}

bool LawReport::passed(const std::string& law) const {
    const LawResult* r = find(law);
    return r != nullptr && r->passed;
}

bool LawReport::all_passed() const {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

void LawReport::merge(const LawReport& other, const std::string& prefix) {
    for (auto r : other.results) {
        if (!prefix.empty()) r.law = prefix + "." + r.law;
        results.push_back(std::move(r));
    }
}

nlohmann::json to_json(const LawReport& report) {
    nlohmann::json laws = nlohmann::json::array();
    for (const auto& r : report.results) {
        nlohmann::json j{{"law", r.law}, {"passed", r.passed}, {"checked", r.checked}};
        if (!r.witness.empty()) j["witness"] = r.witness;
        if (!r.note.empty()) j["note"] = r.note;
        laws.push_back(std::move(j));
    }
    return {{"subject", report.subject}, {"passed", report.all_passed()}, {"laws", laws}};
}

std::string format_text(const LawReport& report) {
    std::ostringstream out;
    out << report.subject << ": " << (report.all_passed() ? "PASS" : "FAIL") << '\n';
    for (const auto& r : report.results) {
        out << "  [" << (r.passed ? "pass" : "FAIL") << "] " << r.law << " (" << r.checked
            << " checks)";
        if (!r.note.empty()) out << " -- " << r.note;
        if (!r.witness.empty()) out << "\n      witness: " << r.witness;
        out << '\n';
    }
    return out.str();
}

std::string fmt_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

} // namespace qlr
