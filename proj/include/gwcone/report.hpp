#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gwcone {

enum class Status { Pass, Fail, Warn };

/// One audit/check outcome. Every Fail names the coefficient or entry where
/// the identity breaks, so runs are reproducible from the printed report.
struct ReportLine {
    Status status;
    std::string check_id;
    std::string detail;
};

struct Report {
    std::vector<ReportLine> lines;

    void pass(const std::string& id, const std::string& detail = "") {
        lines.push_back({Status::Pass, id, detail});
    }
    void fail(const std::string& id, const std::string& detail = "") {
        lines.push_back({Status::Fail, id, detail});
    }
    void warn(const std::string& id, const std::string& detail = "") {
        lines.push_back({Status::Warn, id, detail});
    }
    void check(bool ok, const std::string& id, const std::string& detail = "") {
        ok ? pass(id, detail) : fail(id, detail);
    }
    void append(const Report& other) {
        lines.insert(lines.end(), other.lines.begin(), other.lines.end());
    }

    bool ok() const {
        for (const auto& l : lines)
            if (l.status == Status::Fail) return false;
        return true;
    }
    int count(Status s) const {
        int n = 0;
        for (const auto& l : lines)
            if (l.status == s) ++n;
        return n;
    }

    void print(std::ostream& os) const;
};

}  // namespace gwcone
