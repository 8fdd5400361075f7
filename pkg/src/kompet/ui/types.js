// Wire types mirroring the review service's JSON bodies.
export {};
