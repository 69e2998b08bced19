#pragma once

namespace geofuse {

// Geographic coordinate in degrees: lat in [-90, 90], lon in [-180, 180].
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

// Throws ValidationError for non-finite or out-of-range coordinates.
void validate(const GeoPoint& p);

double deg2rad(double deg);

} // namespace geofuse
