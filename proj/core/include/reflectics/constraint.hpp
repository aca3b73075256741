#pragma once

#include <functional>
#include <string>
#include <vector>

#include "reflectics/types.hpp"

namespace reflectics {

// One smooth constraint f; the feasible region it contributes is {f > 0}.
// Gradients are analytic, supplied by the caller.
struct Constraint {
    std::string id;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    double hessian_bound = 0.0;  // uniform upper bound on |D^2 f|
    double grad_floor = 0.0;     // lower bound on |grad f| where f vanishes in the closure
};

struct Evaluation {
    std::string id;
    double value;
    Vec gradient;
};

class ConstraintSet {
public:
    ConstraintSet(std::vector<Constraint> constraints, int dimension, Mat obliquity);
    ConstraintSet(std::vector<Constraint> constraints, int dimension);  // obliquity = identity

    int dimension() const { return dimension_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const Mat& obliquity() const { return obliquity_; }
    const Mat& reflection_matrix() const { return theta_t_theta_; }  // obliquity^T * obliquity

    // Characteristic length scale used to size the default tolerances.
    double scale() const { return scale_; }
    void set_scale(double s);
    double act_tol() const { return 1e-8 * scale_; }
    double feas_tol() const { return 1e-9 * scale_; }

    std::vector<Evaluation> evaluate(const Vec& x) const;
    std::vector<std::string> active_set(const Vec& x, double act_tol) const;
    std::vector<int> active_indices(const Vec& x, double act_tol) const;

    // min over constraints of f(x); the feasibility margin.
    double min_value(const Vec& x) const;
    bool feasible(const Vec& x, double tol) const { return min_value(x) >= -tol; }

    const Constraint& at(int i) const { return constraints_[static_cast<size_t>(i)]; }
    int size() const { return static_cast<int>(constraints_.size()); }
    int index_of(const std::string& id) const;

    // Optional conservative shortlist of constraints that could be violated
    // at x (must be a superset of the truly violated ones). Lets hard-core
    // systems prune the O(n^2) pair scan with a neighbor grid; results are
    // identical to the dense path.
    std::function<std::vector<int>(const Vec&)> candidate_filter;
    std::vector<int> violation_candidates(const Vec& x) const {
        if (candidate_filter) return candidate_filter(x);
        std::vector<int> all(constraints_.size());
        for (int i = 0; i < size(); ++i) all[static_cast<size_t>(i)] = i;
        return all;
    }

private:
    std::vector<Constraint> constraints_;
    int dimension_;
    Mat obliquity_;
    Mat theta_t_theta_;
    double scale_ = 1.0;

    void validate() const;
};

}  // namespace reflectics
