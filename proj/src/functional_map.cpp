#include "symmetria/functional_map.hpp"

#include <cmath>
#include <string>

#include "symmetria/errors.hpp"

namespace symmetria {

namespace {

struct Vote {
    double sum = 0.0;
    double norm2 = 0.0;
};

Vote tally(const SpectralBasis& basis, const std::vector<GeodesicPath>& paths, int i) {
    Vote vote;
    for (const GeodesicPath& path : paths) {
        Eigen::VectorXd p = restrict_to_path(basis, path, i);
        vote.sum += p.dot(p.reverse());
        vote.norm2 += p.squaredNorm();
    }
    return vote;
}

} // namespace

int eigenfunction_sign(const SpectralBasis& basis, const std::vector<GeodesicPath>& paths,
                       int i, double eps_sign) {
    if (paths.empty()) throw Error("parity vote needs at least one path");
    Vote vote = tally(basis, paths, i);
    if (std::abs(vote.sum) < eps_sign * vote.norm2 || vote.sum == 0.0) return 0;
    return vote.sum > 0.0 ? 1 : -1;
}

FunctionalMap build_functional_map(const SpectralBasis& basis,
                                   const std::vector<GeodesicPath>& paths,
                                   const std::vector<bool>& gap_flags,
                                   double eps_sign, int min_active) {
    if (paths.empty()) throw Error("parity vote needs at least one path");
    if (static_cast<int>(gap_flags.size()) != basis.k)
        throw DimensionError("gap flag list does not match basis size");

    FunctionalMap fm;
    fm.sign.resize(basis.k);
    fm.confidence.resize(basis.k);
    for (int i = 0; i < basis.k; ++i) {
        Vote vote = tally(basis, paths, i);
        fm.confidence[i] = vote.norm2 > 0.0 ? std::abs(vote.sum) / vote.norm2 : 0.0;
        if (gap_flags[i]) {
            fm.sign[i] = 0;
        } else if (std::abs(vote.sum) < eps_sign * vote.norm2 || vote.sum == 0.0) {
            fm.sign[i] = 0;
        } else {
            fm.sign[i] = vote.sum > 0.0 ? 1 : -1;
        }
    }
    // The constant eigenfunction is even under any self-map.
    fm.sign[0] = 1;

    for (int i = 0; i < basis.k; ++i)
        if (fm.sign[i] != 0 && !gap_flags[i]) fm.active.push_back(i);

    if (static_cast<int>(fm.active.size()) < min_active)
        throw DegenerateMapError("only " + std::to_string(fm.active.size()) +
                                 " eigenfunctions kept a parity; need at least " +
                                 std::to_string(min_active));
    return fm;
}

} // namespace symmetria
