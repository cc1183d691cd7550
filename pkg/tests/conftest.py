import hypothesis

hypothesis.settings.register_profile(
    "fast", max_examples=15, deadline=None
)
hypothesis.settings.register_profile(
    "default", max_examples=50, deadline=None
)
hypothesis.settings.load_profile("default")
