#include <doctest.h>

#include <cmath>

#include "shelf/arm.hpp"
#include "shelf/bench.hpp"
#include "shelf/sensor.hpp"

using namespace shelf;

namespace {

Scene make(std::vector<ObjectInstance> objs, ObjectId target = 0) {
    const Workspace ws = default_workspace();
    return Scene(std::move(objs), ws, default_camera(ws), target);
}

const VoxelGrid::OccludedCenters kNoOcclusion{};

}  // namespace

TEST_CASE("sample_grasps geometry") {
    const Workspace ws = default_workspace();
    const ArmModel arm;
    const ObjectInstance obj{0, Shape::cylinder(0.03, 0.12), {0.05, 0.25, 0, 0}, "red"};
    Rng rng(51);

    SUBCASE("n=1 is exactly head-on") {
        const auto cands = sample_grasps(obj, ws, arm, 1, rng);
        REQUIRE(cands.size() == 1);
        CHECK(cands[0].approach.x == doctest::Approx(0.0));
        CHECK(cands[0].approach.y == doctest::Approx(1.0));
        const double radius = obj.shape.a + arm.standoff + arm.gripper_hx;
        CHECK(cands[0].gripper_pose.x == doctest::Approx(obj.pose.x));
        CHECK(cands[0].gripper_pose.y == doctest::Approx(obj.pose.y - radius));
    }
    SUBCASE("n=16: distinct, angularly ordered, all entering the open face") {
        const auto cands = sample_grasps(obj, ws, arm, 16, rng);
        REQUIRE(cands.size() == 16);
        double prev = -10;
        for (const auto& c : cands) {
            CHECK(Vec2{c.approach.x, c.approach.y}.norm() == doctest::Approx(1.0));
            CHECK(c.approach.y > 0);  // backward extension exits the -y face
            const double angle = std::atan2(-c.approach.x, c.approach.y);
            CHECK(angle > prev);
            prev = angle;
            // Gripper sits on the standoff circle, opposite the approach.
            const double radius = obj.shape.a + arm.standoff + arm.gripper_hx;
            CHECK(Vec2{c.gripper_pose.x - obj.pose.x, c.gripper_pose.y - obj.pose.y}.norm() ==
                  doctest::Approx(radius));
        }
    }
    SUBCASE("grasp z is the clamped mid-height") {
        const auto low = sample_grasps(obj, ws, arm, 1, rng);
        // Mid height 0.06 is below the corridor half-height: clamped up.
        CHECK(low[0].gripper_pose.z ==
              doctest::Approx(std::max(0.06, ws.interior.min.z + arm.corridor_height / 2)));
    }
}

TEST_CASE("grasp_volumes: corridor spans open face to gripper") {
    const Workspace ws = default_workspace();
    const ArmModel arm;
    const ObjectInstance obj{0, Shape::cylinder(0.03, 0.2), {0.0, 0.3, 0, 0}, "red"};
    Rng rng(52);
    const auto cand = sample_grasps(obj, ws, arm, 1, rng)[0];
    const auto vols = grasp_volumes(cand, ws, arm);
    REQUIRE(vols.size() == 2);
    const double gz = cand.gripper_pose.z;
    // Points along the approach line from the open face to the gripper.
    for (double y = ws.open_face_y() + 1e-6; y < cand.gripper_pose.y; y += 0.02)
        CHECK((vols[0].contains({0, y, gz}) || vols[1].contains({0, y, gz})));
    // Clearly outside.
    CHECK(!vols[0].contains({0.3, 0.1, gz}));
    CHECK(!vols[1].contains({0.3, 0.1, gz}));
}

TEST_CASE("grasp_feasibility outcomes") {
    const Workspace ws = default_workspace();
    const ArmModel arm;
    Rng rng(53);
    const ObjectInstance back{0, Shape::cylinder(0.03, 0.12), {0.0, 0.3, 0, 0}, "red"};

    SUBCASE("lone object is Free") {
        const Scene belief = make({back});
        const auto cand = sample_grasps(back, ws, arm, 1, rng)[0];
        CHECK(grasp_feasibility(cand, belief, kNoOcclusion, ws, arm).kind == Feasibility::Free);
    }
    SUBCASE("object straight behind another: head-on Blocked by the front one") {
        const ObjectInstance front{1, Shape::cylinder(0.03, 0.12), {0.0, 0.15, 0, 0}, "blue"};
        const Scene belief = make({back, front});
        const auto cand = sample_grasps(back, ws, arm, 1, rng)[0];
        const GraspCheck check = grasp_feasibility(cand, belief, kNoOcclusion, ws, arm);
        CHECK(check.kind == Feasibility::Blocked);
        CHECK(check.blockers == std::vector<ObjectId>{1});
    }
    SUBCASE("occluded space in the corridor vetoes without blockers") {
        const Scene belief = make({back});
        const auto cand = sample_grasps(back, ws, arm, 1, rng)[0];
        VoxelGrid::OccludedCenters occ;
        occ.x = {0.0};
        occ.y = {0.15};
        occ.z = {cand.gripper_pose.z};
        occ.masks = {1};
        CHECK(grasp_feasibility(cand, belief, occ, ws, arm).kind ==
              Feasibility::UnsafeOccluded);
    }
    SUBCASE("approach away from the open face is OutOfReach") {
        const Scene belief = make({back});
        GraspCandidate cand;
        cand.object = 0;
        cand.approach = {0.0, -1.0};
        cand.gripper_pose = {0.0, 0.37, 0.06, normalize_yaw(std::atan2(-1.0, 0.0))};
        CHECK(grasp_feasibility(cand, belief, kNoOcclusion, ws, arm).kind ==
              Feasibility::OutOfReach);
    }
    SUBCASE("corner object: slanted approaches leave the workspace") {
        const ObjectInstance corner{0, Shape::cylinder(0.03, 0.12), {0.26, 0.35, 0, 0}, "red"};
        const Scene belief = make({corner});
        int out = 0;
        for (const auto& cand : sample_grasps(corner, ws, arm, 16, rng))
            if (grasp_feasibility(cand, belief, kNoOcclusion, ws, arm).kind ==
                Feasibility::OutOfReach)
                ++out;
        CHECK(out > 0);
    }
}

TEST_CASE("feasibility is monotone under object removal") {
    Rng rng(54);
    for (uint64_t seed : {55u, 56u}) {
        Rng gen(seed);
        const Scene world = generate_scene(7, gen);
        const SenseResult sense = render(world);
        const Scene belief = world.restricted_to(visible_objects(sense));
        const ArmModel arm;
        for (const auto& obj : belief.objects()) {
            for (const auto& cand :
                 sample_grasps(obj, belief.workspace(), arm, 8, rng)) {
                const GraspCheck full =
                    grasp_feasibility(cand, belief, kNoOcclusion, belief.workspace(), arm);
                for (const auto& other : belief.objects()) {
                    if (other.id == obj.id) continue;
                    const Scene reduced = belief.without_object(other.id);
                    const GraspCheck less =
                        grasp_feasibility(cand, reduced, kNoOcclusion, belief.workspace(), arm);
                    if (full.kind == Feasibility::Free)
                        CHECK(less.kind == Feasibility::Free);
                    if (less.kind == Feasibility::Blocked)
                        CHECK(full.kind == Feasibility::Blocked);
                }
            }
        }
    }
}

TEST_CASE("plan_pick and plan_place") {
    const Workspace ws = default_workspace();
    const ArmModel arm;
    const ObjectInstance obj{0, Shape::cylinder(0.03, 0.12), {0.0, 0.3, 0, 0}, "red"};

    SUBCASE("lone object: pickable, and placeable at its own pose") {
        const Scene world = make({obj});
        const SenseResult sense = render(world);
        const VoxelGrid grid =
            VoxelGrid::build(sense, world.camera(), world, world.workspace(), 0.02);
        Rng rng(57);
        const auto pick = plan_pick(0, world, grid, arm, 16, rng);
        REQUIRE(pick.has_value());
        CHECK(pick->object == 0);

        const Scene empty_belief = world.without_object(0);
        Rng rng2(57);
        const auto place = plan_place(obj, obj.pose, empty_belief,
                                      filter_occluded(grid, 0), ws, arm, 16, rng2);
        CHECK(place.has_value());
    }
    SUBCASE("walled-in object has no pick") {
        // Low enough to leave the cylinder visible, tall enough to cross
        // every approach corridor (z 0.03..0.09).
        const ObjectInstance wall{1, Shape::box(0.4, 0.05, 0.08), {0.0, 0.15, 0, 0}, "gray"};
        const Scene world = make({obj, wall});
        const SenseResult sense = render(world);
        const Scene belief = world.restricted_to(visible_objects(sense));
        const VoxelGrid grid =
            VoxelGrid::build(sense, world.camera(), belief, world.workspace(), 0.02);
        Rng rng(58);
        CHECK(!plan_pick(0, belief, grid, arm, 16, rng).has_value());
        CHECK(plan_pick(1, belief, grid, arm, 16, rng).has_value());
    }
    SUBCASE("plan_pick is deterministic") {
        const Scene world = make({obj});
        const SenseResult sense = render(world);
        const VoxelGrid grid =
            VoxelGrid::build(sense, world.camera(), world, world.workspace(), 0.02);
        Rng a(59), b(59);
        const auto pa = plan_pick(0, world, grid, arm, 16, a);
        const auto pb = plan_pick(0, world, grid, arm, 16, b);
        REQUIRE((pa.has_value() && pb.has_value()));
        CHECK(pa->gripper_pose == pb->gripper_pose);
    }
}

TEST_CASE("filter_occluded drops sole occlusions, keeps joint ones") {
    const ObjectInstance a{0, Shape::cylinder(0.05, 0.3), {-0.02, 0.12, 0, 0}, "red"};
    const ObjectInstance b{1, Shape::cylinder(0.05, 0.3), {0.06, 0.27, 0, 0}, "blue"};
    const Scene world = make({a, b});
    const SenseResult sense = render(world);
    const VoxelGrid grid =
        VoxelGrid::build(sense, world.camera(), world, world.workspace(), 0.01);

    const auto& all = grid.occluded_centers();
    const auto only_b = filter_occluded(grid, 0);
    const uint32_t bit_a = grid.slot_mask_for(0);

    size_t expected = 0;
    for (uint32_t m : all.masks)
        if (m & ~bit_a) ++expected;
    CHECK(only_b.x.size() == expected);
    CHECK(only_b.x.size() < all.x.size());
    for (uint32_t m : only_b.masks) {
        CHECK((m & bit_a) == 0);
        CHECK(m != 0);
    }
    // Excluding an id that occludes nothing is the identity.
    CHECK(filter_occluded(grid, 77).x.size() == all.x.size());
}
