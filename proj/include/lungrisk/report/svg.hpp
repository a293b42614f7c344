#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lungrisk/matrix.hpp"
#include "lungrisk/ml/svm.hpp"
#include "lungrisk/stats.hpp"

namespace lungrisk::report {

// Correlation heatmap on a diverging blue-white-red scale with each cell
// labelled to two decimals.
std::string heatmap_svg(const stats::CorrelationMatrix& cm, std::string_view title);

// Horizontal bars in the given order, each labelled with its value to four decimals.
std::string bar_chart_svg(const std::vector<std::string>& labels, const std::vector<double>& values,
                          std::string_view title, std::string_view value_axis);

// 2-D scatter of points coloured by class code (1..3) or cluster index + 1.
// When `boundary` is given, the background is shaded by its predicted class.
std::string scatter_svg(const Matrix& points, const std::vector<int>& classes,
                        std::string_view title, std::string_view x_label,
                        std::string_view y_label, const ml::SvmModel* boundary = nullptr);

// Format used for numbers inside charts.
std::string fixed(double x, int decimals);

}  // namespace lungrisk::report
