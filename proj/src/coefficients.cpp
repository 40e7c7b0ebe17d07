#include "apfront/coefficients.hpp"

#include <cmath>
#include <sstream>

namespace apfront {

namespace {
std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}
}  // namespace

CoefficientSet assemble_coefficients(APFunction a, APFunction b, APFunction c,
                                     APFunction c_tilde, double tol) {
    CoefficientSet cs;
    cs.a = std::move(a);
    cs.b = std::move(b);
    cs.c = std::move(c);
    cs.c_tilde = std::move(c_tilde);
    Bounds ab = bounds(cs.a, tol);
    cs.alpha_m = ab.lower;
    cs.alpha_M = ab.upper;
    cs.b_range = bounds(cs.b, tol);
    cs.c_range = bounds(cs.c, tol);
    cs.ct_range = bounds(cs.c_tilde, tol);
    return cs;
}

ValidationReport validate_coefficients(const CoefficientSet& cs) {
    ValidationReport rep;
    rep.add("ellipticity", cs.alpha_m > 0.0,
            "inf a = " + fmt(cs.alpha_m) + ", sup a = " + fmt(cs.alpha_M));
    rep.add("reaction_positivity", cs.c_range.lower > 0.0, "inf c = " + fmt(cs.c_range.lower));

    const double sup_b2 =
        std::max(cs.b_range.lower * cs.b_range.lower, cs.b_range.upper * cs.b_range.upper);
    const double rhs = 4.0 * cs.alpha_m * (cs.c_range.lower + cs.ct_range.lower);
    const bool strict = sup_b2 < rhs;
    const bool relaxed = cs.b.is_zero() && cs.c_range.lower > 0.0;
    std::string detail = "sup b^2 = " + fmt(sup_b2) + ", 4 alpha_m (inf c + inf c~) = " + fmt(rhs);
    if (!strict && relaxed) detail += " (accepted: b == 0 and inf c > 0, 1-D relaxation)";
    rep.add("spreading_condition", strict || relaxed, detail);

    rep.add("c_tilde_range", true,
            "inf c~ = " + fmt(cs.ct_range.lower) + ", sup c~ = " + fmt(cs.ct_range.upper) +
                ", <c~> = " + fmt(cs.c_tilde.mean()));
    return rep;
}

CoefficientSet make_coefficients(APFunction a, APFunction b, APFunction c, APFunction c_tilde,
                                 double tol) {
    CoefficientSet cs = assemble_coefficients(std::move(a), std::move(b), std::move(c),
                                              std::move(c_tilde), tol);
    ValidationReport rep = validate_coefficients(cs);
    if (!rep.all_pass) {
        std::string msg = "coefficient validation failed:";
        for (const auto& it : rep.items)
            if (!it.pass) msg += " [" + it.name + ": " + it.detail + "]";
        throw CoefficientError(msg);
    }
    return cs;
}

}  // namespace apfront
