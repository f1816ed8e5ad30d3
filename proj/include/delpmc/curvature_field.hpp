#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "delpmc/delaunay.hpp"

namespace delpmc {

/// Expression syntax error; position is 1-based within the source text
/// (length+1 for unexpected end of input).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)),
          position(position) {}
    size_t position;
};

namespace detail {
struct ExprNode;
}

/// Prescribed-curvature family H_eps(x, y, z) parsed from a runtime
/// expression over x, y, z, eps with + - * / ^, parentheses, cos, sin, exp
/// and numeric literals.
///
/// Parsing validates (H1) (H_0 == 1) by sampling and rejects violations.
/// The family is tagged perturbative when eps enters affinely, i.e.
/// H = 1 + eps*Htilde; only perturbative fields support htilde() and the
/// divergence potential Q.
class CurvatureField {
public:
    static CurvatureField parse(const std::string& expr);

    double eval(double eps, double x, double y, double z) const;

    bool perturbative() const { return perturbative_; }
    /// (H2) sampled on random points at parse time
    bool even_in_z() const { return even_in_z_; }
    const std::string& source() const { return source_; }

    /// Htilde = dH/deps at eps = 0 (exact for perturbative families).
    double htilde(double x, double y, double z) const;

    /// Divergence potential
    ///   Q = 1/2 (int_0^x Htilde(s,y,z) ds, int_0^y Htilde(x,s,z) ds, 0),
    /// adaptive Gauss-Legendre to 1e-12. Requires a perturbative field.
    Vec3 eval_Q(double x, double y, double z) const;

private:
    std::shared_ptr<const detail::ExprNode> root_;
    std::string source_;
    bool perturbative_ = false;
    bool even_in_z_ = false;
};

} // namespace delpmc
