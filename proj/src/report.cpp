#include "gwcone/report.hpp"

namespace gwcone {

void Report::print(std::ostream& os) const {
    for (const auto& l : lines) {
        const char* tag = l.status == Status::Pass ? "PASS" : l.status == Status::Fail ? "FAIL" : "WARN";
        os << tag << " " << l.check_id;
        if (!l.detail.empty()) os << " " << l.detail;
        os << "\n";
    }
    os << "== summary pass=" << count(Status::Pass) << " fail=" << count(Status::Fail)
       << " warn=" << count(Status::Warn) << "\n";
}

}  // namespace gwcone
