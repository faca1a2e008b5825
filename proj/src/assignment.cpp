#include "uavqoe/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace uavqoe
{

// Shortest augmenting path with row/column potentials, 1-based internally.
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd &cost)
{
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n > m)
        throw std::invalid_argument("hungarian_min_cost: more rows than columns");
    if (n == 0)
        return {};
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i)
    {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do
        {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j)
            {
                if (used[j])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j])
                {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j)
            {
                if (used[j])
                {
                    u[match[j]] += delta;
                    v[j] -= delta;
                }
                else
                {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do
        {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_of(n, -1);
    for (int j = 1; j <= m; ++j)
        if (match[j] != 0)
            col_of[match[j] - 1] = j - 1;
    return col_of;
}

} // namespace uavqoe
