#pragma once

#include "oracles.hpp"
#include "panelkt/panel.hpp"

namespace testutil {

inline panelkt::SamplePanel to_panel(const oracle::Rows& rows) {
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto T = static_cast<Eigen::Index>(rows.front().size());
    panelkt::Matrix v(m, T);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index t = 0; t < T; ++t) v(i, t) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    return panelkt::SamplePanel::on_unit_grid(std::move(v));
}

inline oracle::Rows to_rows(const panelkt::Matrix& v) {
    oracle::Rows rows(static_cast<std::size_t>(v.rows()), std::vector<double>(static_cast<std::size_t>(v.cols())));
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index t = 0; t < v.cols(); ++t) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = v(i, t);
    return rows;
}

inline oracle::Rows to_rows(const panelkt::SamplePanel& p) { return to_rows(p.values()); }

inline panelkt::Matrix to_matrix(const oracle::Rows& rows) { return to_panel(rows).values(); }

}  // namespace testutil
