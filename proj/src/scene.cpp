#include "shelf/scene.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace shelf {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// b rests directly on a: contact plus bottom-at-top-face within tolerance.
bool rests_on(const ObjectInstance& below, const ObjectInstance& above) {
    const double top = below.pose.z + below.shape.height();
    if (std::abs(above.pose.z - top) > kSupportEps) return false;
    return footprint_distance(below.shape, below.pose, above.shape, above.pose) <= kContactEps;
}

}  // namespace

Scene::Scene(std::vector<ObjectInstance> objects, Workspace workspace, CameraModel camera,
             ObjectId target)
    : objects_(std::move(objects)), workspace_(workspace), camera_(camera), target_(target) {}

bool Scene::has_object(ObjectId id) const {
    return std::any_of(objects_.begin(), objects_.end(),
                       [id](const ObjectInstance& o) { return o.id == id; });
}

const ObjectInstance& Scene::object(ObjectId id) const {
    for (const auto& o : objects_)
        if (o.id == id) return o;
    throw SceneError("no object with id " + std::to_string(id));
}

void Scene::validate() const {
    const Vec3 ext = workspace_.interior.extent();
    if (ext.x <= 0 || ext.y <= 0 || ext.z <= 0)
        throw SceneError("workspace interior must have positive extent");

    std::set<ObjectId> ids;
    for (const auto& o : objects_) {
        if (!ids.insert(o.id).second)
            throw SceneError("duplicate object id " + std::to_string(o.id));
        if (o.shape.a <= 0 || o.shape.b <= 0 ||
            (o.shape.kind == ShapeKind::Box && o.shape.c <= 0))
            throw SceneError("non-positive shape dimension on object " + std::to_string(o.id));
        if (!std::isfinite(o.pose.x) || !std::isfinite(o.pose.y) || !std::isfinite(o.pose.z) ||
            !std::isfinite(o.pose.yaw))
            throw SceneError("non-finite pose on object " + std::to_string(o.id));

        // Fully inside the workspace.
        const Aabb& ws = workspace_.interior;
        const double r = o.shape.circum_radius();
        const double top = o.pose.z + o.shape.height();
        bool inside = o.pose.z >= ws.min.z - kSupportEps && top <= ws.max.z + kSupportEps;
        if (o.shape.kind == ShapeKind::Cylinder) {
            inside = inside && o.pose.x - o.shape.a >= ws.min.x - kSupportEps &&
                     o.pose.x + o.shape.a <= ws.max.x + kSupportEps &&
                     o.pose.y - o.shape.a >= ws.min.y - kSupportEps &&
                     o.pose.y + o.shape.a <= ws.max.y + kSupportEps;
        } else {
            for (const Vec2& c : footprint_rect(o.shape, o.pose).corners())
                inside = inside && c.x >= ws.min.x - kSupportEps && c.x <= ws.max.x + kSupportEps &&
                         c.y >= ws.min.y - kSupportEps && c.y <= ws.max.y + kSupportEps;
        }
        (void)r;
        if (!inside) throw SceneError("object " + std::to_string(o.id) + " outside workspace");
    }
    if (!ids.count(target_)) throw SceneError("target id not present in scene");

    // Pairwise separation.
    for (size_t i = 0; i < objects_.size(); ++i)
        for (size_t j = i + 1; j < objects_.size(); ++j) {
            const auto& a = objects_[i];
            const auto& b = objects_[j];
            if (shape_distance(a.shape, a.pose, b.shape, b.pose) < -kPenetrationEps)
                throw SceneError("objects " + std::to_string(a.id) + " and " +
                                 std::to_string(b.id) + " interpenetrate");
        }

    // Support: on the table, or resting on exactly one other object.
    for (const auto& o : objects_) {
        if (std::abs(o.pose.z - workspace_.table_z()) <= kSupportEps) continue;
        int supporters = 0;
        for (const auto& s : objects_)
            if (s.id != o.id && rests_on(s, o)) ++supporters;
        if (supporters != 1)
            throw SceneError("object " + std::to_string(o.id) + " is not supported (" +
                             std::to_string(supporters) + " supporters)");
    }
}

std::set<std::pair<ObjectId, ObjectId>> Scene::contacts(double contact_eps) const {
    std::set<std::pair<ObjectId, ObjectId>> out;
    for (size_t i = 0; i < objects_.size(); ++i)
        for (size_t j = i + 1; j < objects_.size(); ++j) {
            const auto& a = objects_[i];
            const auto& b = objects_[j];
            if (shape_distance(a.shape, a.pose, b.shape, b.pose) <= contact_eps)
                out.insert({std::min(a.id, b.id), std::max(a.id, b.id)});
        }
    return out;
}

std::vector<ObjectId> Scene::supported_by(ObjectId id) const {
    const auto& base = object(id);
    std::vector<ObjectId> out;
    for (const auto& o : objects_)
        if (o.id != id && rests_on(base, o)) out.push_back(o.id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Stack> Scene::stacks() const {
    // Union-find over direct support contacts.
    std::map<ObjectId, ObjectId> parent;
    for (const auto& o : objects_) parent[o.id] = o.id;
    std::function<ObjectId(ObjectId)> find = [&](ObjectId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& a : objects_)
        for (const auto& b : objects_)
            if (a.id != b.id && rests_on(a, b)) parent[find(a.id)] = find(b.id);

    std::map<ObjectId, Stack> groups;
    for (const auto& o : objects_) {
        Stack& st = groups[find(o.id)];
        st.members.push_back(o.id);
    }
    std::vector<Stack> out;
    for (auto& [root, st] : groups) {
        std::sort(st.members.begin(), st.members.end());
        // Base = lowest bottom face; ties broken by id via member order.
        double best_z = kInf;
        for (ObjectId id : st.members) {
            const double z = object(id).pose.z;
            if (z < best_z - kSupportEps) {
                best_z = z;
                st.base = id;
            }
        }
        st.base_on_table = std::abs(best_z - workspace_.table_z()) <= kSupportEps;
        out.push_back(st);
    }
    std::sort(out.begin(), out.end(),
              [](const Stack& a, const Stack& b) { return a.base < b.base; });
    return out;
}

Scene Scene::apply_pick(ObjectId id) const {
    if (!has_object(id)) throw SceneError("pick of unknown object " + std::to_string(id));
    const auto on_top = supported_by(id);
    if (!on_top.empty())
        throw PickBlocked("object " + std::to_string(id) + " has " +
                          std::to_string(on_top.size()) + " object(s) resting on it");
    Scene out = *this;
    out.objects_.erase(std::remove_if(out.objects_.begin(), out.objects_.end(),
                                      [id](const ObjectInstance& o) { return o.id == id; }),
                       out.objects_.end());
    return out;
}

Scene Scene::apply_place(ObjectId id, const ObjectInstance& held, Pose pose) const {
    if (has_object(id)) throw PlaceCollision("object " + std::to_string(id) + " already placed");
    Scene out = *this;
    ObjectInstance placed = held;
    placed.id = id;
    placed.pose = pose;
    placed.pose.z = workspace_.table_z();
    placed.pose.yaw = normalize_yaw(pose.yaw);
    out.objects_.push_back(placed);
    try {
        out.validate();
    } catch (const SceneError& e) {
        throw PlaceCollision(std::string("invalid placement: ") + e.what());
    }
    return out;
}

Scene Scene::apply_restore(const ObjectInstance& held) const {
    if (has_object(held.id))
        throw PlaceCollision("object " + std::to_string(held.id) + " already placed");
    Scene out = *this;
    out.objects_.push_back(held);
    try {
        out.validate();
    } catch (const SceneError& e) {
        throw PlaceCollision(std::string("invalid place-back: ") + e.what());
    }
    return out;
}

Scene Scene::without_object(ObjectId id) const {
    Scene out = *this;
    out.objects_.erase(std::remove_if(out.objects_.begin(), out.objects_.end(),
                                      [id](const ObjectInstance& o) { return o.id == id; }),
                       out.objects_.end());
    return out;
}

Scene Scene::restricted_to(const std::vector<ObjectId>& visible) const {
    Scene out = *this;
    out.objects_.clear();
    for (const auto& o : objects_)
        if (std::find(visible.begin(), visible.end(), o.id) != visible.end())
            out.objects_.push_back(o);
    return out;
}

void Scene::save(std::ostream& out) const {
    out << "shelf-scene v1\n";
    const Aabb& ws = workspace_.interior;
    out << "workspace " << fmt_double(ws.min.x) << ' ' << fmt_double(ws.min.y) << ' '
        << fmt_double(ws.min.z) << ' ' << fmt_double(ws.max.x) << ' ' << fmt_double(ws.max.y)
        << ' ' << fmt_double(ws.max.z) << '\n';
    out << "camera " << fmt_double(camera_.fx) << ' ' << fmt_double(camera_.fy) << ' '
        << fmt_double(camera_.cx) << ' ' << fmt_double(camera_.cy) << ' ' << camera_.width << ' '
        << camera_.height << '\n';
    out << "camera_pose";
    for (double v : camera_.rotation.m) out << ' ' << fmt_double(v);
    out << ' ' << fmt_double(camera_.translation.x) << ' ' << fmt_double(camera_.translation.y)
        << ' ' << fmt_double(camera_.translation.z) << '\n';
    out << "target " << target_ << '\n';
    for (const auto& o : objects_) {
        out << "object " << o.id << ' '
            << (o.shape.kind == ShapeKind::Cylinder ? "cylinder" : "box") << ' '
            << fmt_double(o.shape.a) << ' ' << fmt_double(o.shape.b) << ' '
            << fmt_double(o.shape.c) << ' ' << fmt_double(o.pose.x) << ' '
            << fmt_double(o.pose.y) << ' ' << fmt_double(o.pose.z) << ' '
            << fmt_double(o.pose.yaw) << ' ' << (o.color.empty() ? "-" : o.color) << '\n';
    }
    out << "end\n";
}

Scene Scene::load(std::istream& in) {
    std::string header;
    std::getline(in, header);
    if (header != "shelf-scene v1") throw SceneError("bad scene header: " + header);

    Workspace ws;
    CameraModel cam;
    ObjectId target = 0;
    std::vector<ObjectInstance> objects;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "end") break;
        if (tag == "workspace") {
            ls >> ws.interior.min.x >> ws.interior.min.y >> ws.interior.min.z >>
                ws.interior.max.x >> ws.interior.max.y >> ws.interior.max.z;
        } else if (tag == "camera") {
            ls >> cam.fx >> cam.fy >> cam.cx >> cam.cy >> cam.width >> cam.height;
        } else if (tag == "camera_pose") {
            for (double& v : cam.rotation.m) ls >> v;
            ls >> cam.translation.x >> cam.translation.y >> cam.translation.z;
        } else if (tag == "target") {
            ls >> target;
        } else if (tag == "object") {
            ObjectInstance o;
            std::string kind;
            ls >> o.id >> kind >> o.shape.a >> o.shape.b >> o.shape.c >> o.pose.x >> o.pose.y >>
                o.pose.z >> o.pose.yaw >> o.color;
            o.shape.kind = kind == "cylinder" ? ShapeKind::Cylinder : ShapeKind::Box;
            if (o.color == "-") o.color.clear();
            objects.push_back(o);
        } else {
            throw SceneError("unknown scene record: " + tag);
        }
        if (ls.fail()) throw SceneError("malformed scene record: " + line);
    }
    return Scene(std::move(objects), ws, cam, target);
}

void Scene::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw SceneError("cannot open " + path + " for writing");
    save(out);
}

Scene Scene::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SceneError("cannot open " + path);
    return load(in);
}

}  // namespace shelf
