#pragma once

#include "leanlab/models.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace leanlab::detail {

/// Position of each label within classes.
inline std::vector<int> class_positions(std::span<const Leaning> labels, const std::vector<Leaning>& classes) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (Leaning l : labels) {
        int pos = -1;
        for (std::size_t k = 0; k < classes.size(); ++k) {
            if (classes[k] == l) pos = static_cast<int>(k);
        }
        if (pos < 0) throw std::invalid_argument("label outside the classifier's classes");
        out.push_back(pos);
    }
    return out;
}

/// Training-set checks shared by every trainer; returns the classes present.
inline std::vector<Leaning> training_classes(const Dataset& train) {
    train.validate();
    if (train.size() == 0) throw std::invalid_argument("empty training set");
    auto classes = present_classes(train.labels);
    if (classes.size() < 2) throw std::invalid_argument("training set needs at least two distinct labels");
    return classes;
}

inline void softmax_rows(DenseRows& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double mx = m.row(r).maxCoeff();
        m.row(r) = (m.row(r).array() - mx).exp();
        m.row(r) /= m.row(r).sum();
    }
}

inline nlohmann::json matrix_json(const DenseRows& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out.push_back(std::vector<double>(m.row(r).data(), m.row(r).data() + m.cols()));
    }
    return out;
}

inline DenseRows matrix_from_json(const nlohmann::json& j, Eigen::Index cols = -1) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (cols < 0) cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    DenseRows m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto row = j[static_cast<std::size_t>(r)].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != cols) throw std::invalid_argument("ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

inline nlohmann::json vector_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    const auto vals = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline bool all_finite(const DenseRows& m) { return m.allFinite(); }

} // namespace leanlab::detail
