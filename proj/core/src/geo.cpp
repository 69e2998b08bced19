#include "geofuse/geo.hpp"

#include <cmath>
#include <string>

#include "geofuse/errors.hpp"

namespace geofuse {

void validate(const GeoPoint& p) {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) {
        throw ValidationError("coordinate is not finite");
    }
    if (p.lat < -90.0 || p.lat > 90.0) {
        throw ValidationError("latitude " + std::to_string(p.lat) + " outside [-90, 90]");
    }
    if (p.lon < -180.0 || p.lon > 180.0) {
        throw ValidationError("longitude " + std::to_string(p.lon) + " outside [-180, 180]");
    }
}

double deg2rad(double deg) {
    constexpr double kPi = 3.14159265358979323846;
    return deg * kPi / 180.0;
}

} // namespace geofuse
