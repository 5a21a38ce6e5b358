#include "shelf/camera.hpp"

namespace shelf {

CameraModel make_shelf_camera(const Aabb& interior, double stand_off, double cam_z, double pitch,
                              int width, int height, double fx, double fy) {
    CameraModel cam;
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    cam.width = width;
    cam.height = height;
    // Base orientation: camera +z along world +y, +x along world +x,
    // +y (image down) along world -z.
    const Mat3 base{{1, 0, 0, 0, 0, 1, 0, -1, 0}};
    cam.rotation = base * rot_x(-pitch);
    cam.translation = {0.5 * (interior.min.x + interior.max.x), interior.min.y - stand_off,
                       cam_z};
    return cam;
}

}  // namespace shelf
