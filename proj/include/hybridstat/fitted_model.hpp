#pragma once

#include <cstddef>
#include <span>

namespace hybridstat {

// Role shared by every trained predictor: a pure, immutable map from one
// feature row to one real value. For regression models the value is the
// predicted response; for probabilistic classifiers it is P(class 1); for
// margin classifiers it is the signed margin. Used by the explanation layer,
// which only needs single-row evaluation.
class FittedModel {
public:
    virtual ~FittedModel() = default;

    virtual std::size_t feature_count() const = 0;
    virtual double predict_row(std::span<const double> x) const = 0;
};

} // namespace hybridstat
