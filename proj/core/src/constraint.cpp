#include "reflectics/constraint.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace reflectics {

ConstraintSet::ConstraintSet(std::vector<Constraint> constraints, int dimension, Mat obliquity)
    : constraints_(std::move(constraints)), dimension_(dimension), obliquity_(std::move(obliquity)) {
    validate();
    theta_t_theta_ = obliquity_.transpose() * obliquity_;
}

ConstraintSet::ConstraintSet(std::vector<Constraint> constraints, int dimension)
    : ConstraintSet(std::move(constraints), dimension, Mat(Mat::Identity(dimension, dimension))) {}

void ConstraintSet::validate() const {
    require(dimension_ > 0, "constraint set: dimension must be positive");
    require(obliquity_.rows() == dimension_ && obliquity_.cols() == dimension_,
            "constraint set: obliquity must be DxD");
    require(obliquity_.allFinite(), "constraint set: obliquity has non-finite entries");
    const double det = obliquity_.determinant();
    require(std::isfinite(det) && std::abs(det) > 0.0, "constraint set: obliquity is singular");
    Eigen::JacobiSVD<Mat> svd(obliquity_);
    const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    require(std::isfinite(cond), "constraint set: obliquity condition number not finite");

    std::unordered_set<std::string> ids;
    for (const auto& c : constraints_) {
        require(!c.id.empty(), "constraint set: empty constraint id");
        require(ids.insert(c.id).second, "constraint set: duplicate constraint id '" + c.id + "'");
        require(static_cast<bool>(c.value) && static_cast<bool>(c.gradient),
                "constraint '" + c.id + "': value and gradient must be callable");
        require(c.hessian_bound >= 0.0, "constraint '" + c.id + "': negative hessian bound");
        require(c.grad_floor > 0.0, "constraint '" + c.id + "': grad_floor must be positive");
    }
}

void ConstraintSet::set_scale(double s) {
    require(s > 0.0 && std::isfinite(s), "constraint set: scale must be positive");
    scale_ = s;
}

std::vector<Evaluation> ConstraintSet::evaluate(const Vec& x) const {
    require(x.size() == dimension_, "evaluate: dimension mismatch");
    require(all_finite(x), "evaluate: non-finite state");
    std::vector<Evaluation> out;
    out.reserve(constraints_.size());
    for (const auto& c : constraints_) out.push_back({c.id, c.value(x), c.gradient(x)});
    return out;
}

std::vector<int> ConstraintSet::active_indices(const Vec& x, double act_tol) const {
    require(act_tol > 0.0, "active_set: act_tol must be positive");
    require(x.size() == dimension_, "active_set: dimension mismatch");
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (constraints_[static_cast<size_t>(i)].value(x) <= act_tol) out.push_back(i);
    return out;
}

std::vector<std::string> ConstraintSet::active_set(const Vec& x, double act_tol) const {
    std::vector<std::string> out;
    for (int i : active_indices(x, act_tol)) out.push_back(constraints_[static_cast<size_t>(i)].id);
    return out;
}

double ConstraintSet::min_value(const Vec& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints_) m = std::min(m, c.value(x));
    return m;
}

int ConstraintSet::index_of(const std::string& id) const {
    for (int i = 0; i < size(); ++i)
        if (constraints_[static_cast<size_t>(i)].id == id) return i;
    return -1;
}

}  // namespace reflectics
