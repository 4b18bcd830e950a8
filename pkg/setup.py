import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="lifelong-skill-policy",
    version="0.1.0",
    description="Lifelong imitation learning with an expandable skill codebook "
                "and mode-approximation adapters.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=[
        'lifelong_skill_policy',
        'lifelong_skill_policy.core',
        'lifelong_skill_policy.envs',
        'lifelong_skill_policy.policy',
        'lifelong_skill_policy.lifelong',
        'lifelong_skill_policy.metrics',
        'lifelong_skill_policy.experiment'
    ],
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.7',
    install_requires=[
        "networkx>=2.4",
        "numpy>=1.20",
        "attrs>=20.3.0"
    ],
    extras_require={
        "dev": [
            "pytest>=5.3.2",
            "flake8>=3.7.9",
            "hypothesis>=5.6.0"
        ]
    },
    setup_requires=['pytest-runner'],
    tests_require=['pytest'],
    entry_points={
        "console_scripts": [
            "lsp = lifelong_skill_policy.main:main"
        ]
    }
)
