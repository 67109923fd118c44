#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "qlr/suites.hpp"

using namespace qlr;

namespace {

std::set<int> parse_ids(const char* s) {
    std::set<int> out;
    std::string cur;
    for (const char* p = s;; ++p) {
        if (*p == ',' || *p == 0) {
            if (!cur.empty()) out.insert(std::stoi(cur));
            cur.clear();
            if (*p == 0) break;
        } else {
            cur += *p;
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> expected_failures;
    bool write_golden = false;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--expect-fail") && i + 1 < argc)
            expected_failures = parse_ids(argv[++i]);
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc)
            only = parse_ids(argv[++i]);
        else if (!std::strcmp(argv[i], "--write-golden"))
            write_golden = true;
        else {
            std::fprintf(stderr, "usage: acceptance [--expect-fail ID,...] [--only ID,...] [--write-golden]\n");
            return 2;
        }
    }
    const std::string golden = std::string(QLR_TEST_DIR) + "/golden/fig1.csv";
    SuiteOptions o;
    if (write_golden) {
        std::FILE* f = std::fopen(golden.c_str(), "wb");
        if (!f) return 2;
        std::string csv = fig1_golden_csv(o.grid);
        std::fwrite(csv.data(), 1, csv.size(), f);
        std::fclose(f);
    }

    const std::vector<std::pair<const char*, std::function<CriterionResult()>>> criteria = {
        {"quantale laws", [&] { return criterionQuantaleLaws(o); }},
        {"derivative laws D1-D6", [&] { return criterionDerivativeLaws(o); }},
        {"exponential self-distance and Hfg", [&] { return criterionExponentials(o); }},
        {"curry/uncurry bijection", [&] { return criterionCurrying(o); }},
        {"soundness under beta", [&] { return criterionSoundness(o); }},
        {"fundamental lemma and reflexivity", [&] { return criterionFundamentalLemma(o); }},
        {"figure 1 reproduction", [&] { return criterionFig1(o, golden); }},
        {"non-additivity witness", [&] { return criterionNonAdditivity(o); }},
        {"ultra-metric lifting", [&] { return criterionUltraMetric(o); }},
        {"motivating contextual bound", [&] { return criterionMotivatingBound(o); }},
        {"LL validity", [&] { return criterionLLValidity(o); }},
    };
    std::vector<CriterionResult> results;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && !only.count(static_cast<int>(i + 1))) continue;
        try {
            results.push_back(criteria[i].second());
        } catch (const std::exception& e) {
            CriterionResult r;
            r.id = static_cast<int>(i + 1);
            r.name = criteria[i].first;
            r.detail = std::string("aborted: ") + e.what();
            results.push_back(r);
        }
    }
    std::set<int> failed;
    for (const auto& r : results) {
        std::fflush(stdout);
        std::printf("%s %2d %s (%.2f s): %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                    r.detail.c_str());
        if (!r.passed) failed.insert(r.id);
    }
    std::printf("%zu of %zu criteria pass\n", results.size() - failed.size(), results.size());
    if (failed == expected_failures) return 0;
    if (!expected_failures.empty()) std::printf("failing set differs from the expected one\n");
    return 1;
}
