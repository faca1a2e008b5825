#pragma once

#include "uavqoe/scenario.hpp"

#include <cmath>
#include <vector>

namespace uavqoe::testing
{

inline UavState uav(int id, double x, double y, double p)
{
    UavState u;
    u.id = id;
    u.q = Vec2(x, y);
    u.p = p;
    return u;
}

inline SubscriberState sub(int id, double x, double y, double R = 0.0316)
{
    SubscriberState s;
    s.id = id;
    s.s = Vec2(x, y);
    s.R = R;
    s.r_th = R;
    return s;
}

inline bool close_rel(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

} // namespace uavqoe::testing
