#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shelf/camera.hpp"
#include "shelf/geom.hpp"

namespace shelf {

using ObjectId = int;
inline constexpr ObjectId kBackground = -1;

inline constexpr double kContactEps = 1e-4;
inline constexpr double kSupportEps = 1e-6;
inline constexpr double kPenetrationEps = 1e-9;

struct ObjectInstance {
    ObjectId id = 0;
    Shape shape;
    Pose pose;
    std::string color;
};

// Shelf geometry. The open face (camera / arm access) is the -y face.
struct Workspace {
    Aabb interior;
    double table_z() const { return interior.min.z; }
    double open_face_y() const { return interior.min.y; }
};

struct SceneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PickBlocked : SceneError {
    using SceneError::SceneError;
};
struct PlaceCollision : SceneError {
    using SceneError::SceneError;
};

// A maximal group of objects connected by transitive support, tagged with
// its lowest member. base_on_table is always true for full ground-truth
// scenes but may be false for belief scenes (the supporter can be unseen).
struct Stack {
    ObjectId base = 0;
    std::vector<ObjectId> members;  // sorted by id, includes base
    bool base_on_table = true;
};

class Scene {
public:
    Scene() = default;
    Scene(std::vector<ObjectInstance> objects, Workspace workspace, CameraModel camera,
          ObjectId target);

    const std::vector<ObjectInstance>& objects() const { return objects_; }
    const Workspace& workspace() const { return workspace_; }
    const CameraModel& camera() const { return camera_; }
    ObjectId target() const { return target_; }

    bool has_object(ObjectId id) const;
    const ObjectInstance& object(ObjectId id) const;

    // Throws SceneError when an invariant is violated.
    void validate() const;

    // Unordered pairs within contact_eps by analytic shape-pair distance.
    std::set<std::pair<ObjectId, ObjectId>> contacts(double contact_eps = kContactEps) const;

    // Partition by transitive support; each stack tagged with its base.
    std::vector<Stack> stacks() const;

    // Ids of objects directly resting on `id` (bottom at its top face).
    std::vector<ObjectId> supported_by(ObjectId id) const;

    // Pick removes the object (held by the arm). Throws PickBlocked when
    // something rests on it.
    Scene apply_pick(ObjectId id) const;

    // Place re-inserts a held object with its bottom at table_z. Throws
    // PlaceCollision when any scene invariant would be violated.
    Scene apply_place(ObjectId id, const ObjectInstance& held, Pose pose) const;

    // Re-inserts a held object at its exact previous pose (place-back).
    // Throws PlaceCollision when any scene invariant would be violated.
    Scene apply_restore(const ObjectInstance& held) const;

    // Restricted view containing only the listed objects (belief scene).
    Scene restricted_to(const std::vector<ObjectId>& visible) const;

    // Copy without the given object (no support checks; no-op if absent).
    Scene without_object(ObjectId id) const;

    void save(std::ostream& out) const;
    static Scene load(std::istream& in);
    void save_file(const std::string& path) const;
    static Scene load_file(const std::string& path);

private:
    std::vector<ObjectInstance> objects_;
    Workspace workspace_;
    CameraModel camera_;
    ObjectId target_ = 0;
};

}  // namespace shelf
