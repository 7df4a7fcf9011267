#include "bcc/metrics.hpp"

#include <cmath>
#include <map>

namespace bcc {

double nmi(const std::vector<cluster_id>& a, const std::vector<cluster_id>& b) {
    if (a.size() != b.size()) throw validation_error("nmi: labelings differ in length");
    if (a.empty()) throw validation_error("nmi: empty labelings");
    const double n = static_cast<double>(a.size());
    std::map<cluster_id, std::int64_t> ca, cb;
    std::map<std::pair<cluster_id, cluster_id>, std::int64_t> joint;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
        ++joint[{a[i], b[i]}];
    }
    auto entropy = [n](const std::map<cluster_id, std::int64_t>& counts) {
        double h = 0.0;
        for (const auto& [label, c] : counts) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log(p);
        }
        return h;
    };
    const double ha = entropy(ca), hb = entropy(cb);
    if (ha + hb == 0.0) return 1.0;  // both single-cluster
    double mi = 0.0;
    for (const auto& [cell, c] : joint) {
        const double pij = static_cast<double>(c) / n;
        const double pi = static_cast<double>(ca[cell.first]) / n;
        const double qj = static_cast<double>(cb[cell.second]) / n;
        mi += pij * std::log(pij / (pi * qj));
    }
    return mi / (0.5 * (ha + hb));
}

}  // namespace bcc
