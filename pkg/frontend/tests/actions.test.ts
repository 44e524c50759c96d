import { describe, expect, it } from "vitest";

import { ApiError, ConsoleApi } from "../src/api.js";
import { dispatchAction, planAction, PROMPTS } from "../src/actions.js";

class FakeApi {
  posts: Array<{ path: string; body: unknown }> = [];
  reply: Record<string, unknown> = { job_id: 42 };
  failWith: ApiError | null = null;

  async post<T>(path: string, body: unknown): Promise<T> {
    if (this.failWith) throw this.failWith;
    this.posts.push({ path, body });
    return this.reply as T;
  }
}

const asApi = (fake: FakeApi) => fake as unknown as ConsoleApi;

describe("confirmation gating", () => {
  it("declining sends nothing and returns null", async () => {
    const fake = new FakeApi();
    const result = await dispatchAction(
      asApi(fake),
      { kind: "migrate", instance: "testvm.project.edu" },
      () => false,
    );
    expect(result).toBeNull();
    expect(fake.posts).toHaveLength(0);
  });

  it("confirming posts exactly once and returns the job id", async () => {
    const fake = new FakeApi();
    const prompts: string[] = [];
    const result = await dispatchAction(
      asApi(fake),
      { kind: "migrate", instance: "testvm.project.edu" },
      (text) => {
        prompts.push(text);
        return true;
      },
    );
    expect(result).toEqual({ jobIds: [42] });
    expect(fake.posts).toEqual([{ path: "/2/instances/testvm.project.edu/migrate", body: {} }]);
    expect(prompts).toEqual([PROMPTS.migrate("testvm.project.edu")]);
  });

  it("verify returns both submitted job ids", async () => {
    const fake = new FakeApi();
    fake.reply = { job_ids: [23, 24], job_id: 23 };
    const result = await dispatchAction(asApi(fake), { kind: "verify" }, () => true);
    expect(result).toEqual({ jobIds: [23, 24] });
  });

  it("API 4xx text passes through verbatim", async () => {
    const fake = new FakeApi();
    fake.failWith = new ApiError(409, "instance firstvm has no replicated disks", "not-drbd");
    await expect(
      dispatchAction(asApi(fake), { kind: "migrate", instance: "firstvm" }, () => true),
    ).rejects.toThrow("instance firstvm has no replicated disks");
  });
});

describe("action plans", () => {
  it("failover carries the ignore-consistency flag", () => {
    const plan = planAction({
      kind: "failover",
      instance: "testvm.project.edu",
      ignoreConsistency: true,
    });
    expect(plan.path).toBe("/2/instances/testvm.project.edu/failover");
    expect(plan.body).toEqual({ ignore_consistency: true });
    expect(plan.prompt).toContain("Failover will happen to image testvm.project.edu");
  });

  it("NIC modify reuses the hot-modify prompt text", () => {
    const plan = planAction({
      kind: "modify_nic",
      instance: "testvm.project.edu",
      nicIndex: 0,
      link: "br-man",
    });
    expect(plan.prompt).toContain("You are about to hot-modify a NIC");
    expect(plan.body).toEqual({ nic_index: 0, link: "br-man", hotplug: true });
  });

  it("lab controls map to the sim endpoints", () => {
    expect(planAction({ kind: "power_toggle", node: "node2.project.edu", to: "off" }).path)
      .toBe("/2/sim/power");
    expect(planAction({ kind: "advance_clock", dt: 60 }).path).toBe("/2/sim/advance-clock");
  });
});
