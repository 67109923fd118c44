#pragma once

#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace qlr {

struct LawResult {
    std::string law;
    bool passed = true;
    std::size_t checked = 0;
    std::string witness; // first counterexample, empty when passed
    std::string note;
};

struct LawReport {
    std::string subject;
    std::vector<LawResult> results;

    LawResult& add(std::string law);
    const LawResult* find(const std::string& law) const;
    bool passed(const std::string& law) const;
    bool all_passed() const;
    void merge(const LawReport& other, const std::string& prefix = {});
};

// Counts checks on a law and records the first failure only.
class LawTally {
  public:
    explicit LawTally(LawResult& r) : r_(r) {}
    bool check(bool ok, const std::string& witness) {
        ++r_.checked;
        if (!ok && r_.passed) {
            r_.passed = false;
            r_.witness = witness;
        }
        return ok;
    }
    // Same, with the witness built only when it is recorded.
    template <class F>
        requires std::invocable<F>
    bool check(bool ok, F&& make_witness) {
        ++r_.checked;
        if (!ok && r_.passed) {
            r_.passed = false;
            r_.witness = make_witness();
        }
        return ok;
    }
    bool failed() const { return !r_.passed; }

  private:
    LawResult& r_;
};

nlohmann::json to_json(const LawReport& report);
std::string format_text(const LawReport& report);

// Shortest round-tripping decimal, "inf" for infinity.
std::string fmt_real(double v);

} // namespace qlr
