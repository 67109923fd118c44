#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlr/report.hpp"
#include "qlr/semantics.hpp"

namespace qlr {

struct SuiteOptions {
    std::size_t max_size = 3; // carrier bound for exhaustive finite enumeration
    std::size_t grid = kDefaultGrid;
    std::uint64_t seed = 1;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::size_t checked = 0;
    std::string detail;
    double seconds = 0;
};

CriterionResult criterionQuantaleLaws(const SuiteOptions& o);
CriterionResult criterionDerivativeLaws(const SuiteOptions& o);
CriterionResult criterionExponentials(const SuiteOptions& o);
CriterionResult criterionCurrying(const SuiteOptions& o);
CriterionResult criterionSoundness(const SuiteOptions& o);
CriterionResult criterionFundamentalLemma(const SuiteOptions& o);
CriterionResult criterionFig1(const SuiteOptions& o, const std::string& golden_path);
CriterionResult criterionNonAdditivity(const SuiteOptions& o);
CriterionResult criterionUltraMetric(const SuiteOptions& o);
CriterionResult criterionMotivatingBound(const SuiteOptions& o);
CriterionResult criterionLLValidity(const SuiteOptions& o);

// x = 0 and r in {0, 0.5, 1, 1.5, 2}, figure a then figure b.
std::string fig1_golden_csv(std::size_t grid = kDefaultGrid);

struct SuiteReport {
    std::string name;
    LawReport report;
    std::string csv; // fig1 only
};

// Sorted by name.
const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const SuiteOptions& o);
// Runs concurrently; the result is sorted by suite name.
std::vector<SuiteReport> run_suites(const std::vector<std::string>& names, const SuiteOptions& o);

} // namespace qlr
