#ifndef CRITSET_ERRORS_HPP
#define CRITSET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace critset {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_matrix : error {
    singular_matrix() : error("matrix determinant below invertibility floor") {}
};

struct conformal_matrix : error {
    conformal_matrix() : error("singular values coincide, no well-defined singular pair") {}
};

struct non_invertible : error {
    explicit non_invertible(const std::string& what) : error(what) {}
};

// Orbit left the escape radius.  The signed index is the first iterate
// whose image exceeded the radius.
struct escaped : error {
    explicit escaped(long long index)
        : error("orbit escaped at iterate " + std::to_string(index)), index(index) {}
    long long index;
};

struct empty_hypothesis : error {
    empty_hypothesis() : error("Pliss product hypothesis fails for this sequence") {}
};

struct hypothesis_failed : error {
    hypothesis_failed() : error("sequence product below 1, split undefined") {}
};

struct degenerate_angle : error {
    degenerate_angle() : error("estimated bundles are not separated, no splitting resolvable") {}
};

struct mesh_too_coarse : error {
    mesh_too_coarse() : error("nearest-neighbor matching exceeds the mesh tolerance") {}
};

struct not_a_saddle : error {
    not_a_saddle() : error("periodic point is not a hyperbolic saddle") {}
};

struct eigen_degenerate : error {
    eigen_degenerate() : error("eigendirections are not well separated") {}
};

struct bracket_invalid : error {
    explicit bracket_invalid(const std::string& what) : error(what) {}
};

struct undetermined : error {
    explicit undetermined(const std::string& what) : error(what) {}
};

struct validation_error : error {
    explicit validation_error(const std::string& what) : error(what) {}
};

}  // namespace critset

#endif
