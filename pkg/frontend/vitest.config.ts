export default {
  test: {
    environment: "node",
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
};
